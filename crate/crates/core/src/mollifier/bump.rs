//! Compact bump kernels `A exp(-sharp/(1 - ((x-c)/r)^2))`.

use super::{Mollifier, MollifierKind, Shape};
use crate::error::{Error, Result};
use crate::C64;

/// Standard symmetric bump on `[-support_radius, support_radius]`,
/// normalized to unit mass by trapezoid quadrature.
pub fn build_bump(support_radius: f64, grid_spacing: f64) -> Result<Mollifier> {
    build_bump_inner(support_radius, 0.0, 1.0, grid_spacing)
}

/// Bump of radius `radius` centered at `center` (an asymmetric mollifier with
/// first moment equal to `center`). Sample grid covers `[-R, R]` with
/// `R = |center| + radius`.
pub fn build_bump_at(radius: f64, center: f64, grid_spacing: f64) -> Result<Mollifier> {
    build_bump_inner(radius, center, 1.0, grid_spacing)
}

/// Bump with a different profile, `exp(-sharp/(1-z^2))`; larger `sharp`
/// concentrates the mass. Used to build kernel pairs with matched
/// derivative sup-norms.
pub fn build_bump_sharp(radius: f64, sharp: f64, grid_spacing: f64) -> Result<Mollifier> {
    build_bump_inner(radius, 0.0, sharp, grid_spacing)
}

fn build_bump_inner(radius: f64, center: f64, sharp: f64, grid_spacing: f64) -> Result<Mollifier> {
    if !(radius > 0.0) {
        return Err(Error::Config(format!(
            "bump support radius {radius} must be positive"
        )));
    }
    if !(grid_spacing > 0.0) {
        return Err(Error::Config("grid spacing must be positive".into()));
    }
    let across = 2.0 * radius / grid_spacing;
    if across < 16.0 {
        return Err(Error::Resolution(format!(
            "only {across:.1} samples across the bump support; need at least 16"
        )));
    }

    let support_radius = center.abs() + radius;
    let n = (2.0 * support_radius / grid_spacing).round() as usize + 1;
    let h = 2.0 * support_radius / (n - 1) as f64;

    let raw = |x: f64| -> f64 {
        let z = (x - center) / radius;
        if z.abs() >= 1.0 {
            0.0
        } else {
            (-sharp / (1.0 - z * z)).exp()
        }
    };
    let xs: Vec<f64> = (0..n).map(|j| -support_radius + j as f64 * h).collect();
    let raw_samples: Vec<f64> = xs.iter().map(|&x| raw(x)).collect();
    let mut mass = 0.0;
    for (j, v) in raw_samples.iter().enumerate() {
        let w = if j == 0 || j + 1 == n { 0.5 } else { 1.0 };
        mass += v * w;
    }
    mass *= h;
    if !(mass > 0.0) {
        return Err(Error::Construction("bump has zero mass".into()));
    }
    let amp = 1.0 / mass;

    // analytic derivatives of A exp(g(z))/..., g(z) = -sharp/(1-z^2):
    //   g'(z)  = -2 sharp z / (1-z^2)^2
    //   g''(z) = -2 sharp (1+3z^2) / (1-z^2)^3
    let d1 = |x: f64| -> f64 {
        let z = (x - center) / radius;
        if z.abs() >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - z * z;
        amp * raw(x) * (-2.0 * sharp * z / (s * s)) / radius
    };
    let d2 = |x: f64| -> f64 {
        let z = (x - center) / radius;
        if z.abs() >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - z * z;
        let g1 = -2.0 * sharp * z / (s * s);
        let g2 = -2.0 * sharp * (1.0 + 3.0 * z * z) / (s * s * s);
        amp * raw(x) * (g1 * g1 + g2) / (radius * radius)
    };

    let mut m = Mollifier {
        kind: MollifierKind::CompactBump,
        support_radius,
        grid_spacing: h,
        samples: raw_samples
            .iter()
            .map(|&v| C64::new(amp * v, 0.0))
            .collect(),
        deriv1: xs.iter().map(|&x| C64::new(d1(x), 0.0)).collect(),
        deriv2: xs.iter().map(|&x| C64::new(d2(x), 0.0)).collect(),
        cumulative: Vec::new(),
        moment_table: Vec::new(),
        quad_tol: 1e-10,
        tail_mass_bound: 0.0,
        id: if center == 0.0 && sharp == 1.0 {
            format!("bump_r{radius:.3}")
        } else {
            format!("bump_r{radius:.3}_c{center:.3}_k{sharp:.3}")
        },
        shape: Shape::BumpExp {
            radius,
            center,
            sharp,
            amp,
        },
    };
    m.recompute_tables(6);

    let mass_err = (m.moment_table[0] - C64::new(1.0, 0.0)).norm();
    if mass_err > m.quad_tol {
        return Err(Error::Construction(format!(
            "bump mass off by {mass_err:.3e} after normalization"
        )));
    }
    Ok(m)
}

/// Build a bump from the `sharp` family rescaled so that
/// `sup|phi'|` matches `target` exactly (the scaling law
/// `sup|phi_R'| = sup|phi'|/R^2` makes the match closed-form).
pub fn build_bump_matched_deriv_sup(
    sharp: f64,
    target: f64,
    grid_spacing: f64,
) -> Result<Mollifier> {
    let base = build_bump_sharp(1.0, sharp, grid_spacing)?;
    let d = base.deriv1_sup();
    let r = (d / target).sqrt();
    // rebuild at radius r with spacing scaled to keep the sample count
    build_bump_sharp(r, sharp, grid_spacing * r)
}
