//! Vanishing-moments kernels.
//!
//! The kernel is the inverse Fourier transform of a frequency plateau
//! `rho(xi)` identically equal to 1 around the origin: every moment
//! `int x^k psi dx = i^k rho^{(k)}(0)` vanishes for `k >= 1` while the mass
//! is `rho(0) = 1`. The plateau is the box `[-b, b]` smoothed by a Gaussian
//! of width `sigma`,
//!
//! `rho(xi) = (erf((xi+b)/sigma) - erf((xi-b)/sigma)) / 2`,
//!
//! which equals 1 on `[-w, w]` to double precision for `b = w + 6 sigma` and
//! vanishes beyond `b + 6 sigma`. The kernel decays like a Gaussian,
//! `|psi(x)| <= exp(-sigma^2 x^2/4)/(pi |x|)`, so the truncation radius can
//! be certified rather than guessed. Construction is by trapezoid quadrature
//! of the inverse Fourier integral; tests cross-check it against the closed
//! form `sin(bx)/(pi x) * exp(-sigma^2 x^2 / 4)`.
//!
//! With a frequency shift `xi0 != 0` the plateau moves off-center and the
//! kernel becomes genuinely complex valued (moments still vanish as long as
//! the plateau stays identically 1 around 0); the solver accepts such data.

use super::{Mollifier, MollifierKind, Shape};
use crate::error::{Error, Result};
use crate::C64;

/// erf via Abramowitz-Stegun 7.1.26-style rational approximation is not
/// accurate enough for the plateau certificates; use the complementary
/// error function continued-fraction/series combination accurate to ~1e-16.
fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x < 3.0 {
        // Taylor/Maclaurin series, converges fast for moderate x
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        let mut n = 0u32;
        while term.abs() > 1e-18 * sum.abs().max(1.0) {
            n += 1;
            term *= -x2 / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        2.0 / std::f64::consts::PI.sqrt() * sum
    } else {
        // asymptotic regime: erfc(x) <= 1e-4 here; continued fraction
        let mut f = 0.0;
        for k in (1..=60).rev() {
            f = 0.5 * k as f64 / (x + f);
        }
        let erfc = (-x * x).exp() / ((x + f) * std::f64::consts::PI.sqrt());
        1.0 - erfc
    }
}

pub struct VanishingMomentsSpec {
    /// Half-width `w` of the frequency plateau (`rho == 1` on `[-w, w]`).
    pub cutoff_width: f64,
    /// Gaussian smoothing width of the plateau edge; defaults to `w`.
    pub sigma: f64,
    /// Frequency shift; nonzero values give a complex-valued kernel.
    pub freq_shift: f64,
    /// Moments `1..=p_max` are certified below `moment_tol`.
    pub p_max: usize,
    pub moment_tol: f64,
    pub grid_spacing: f64,
}

impl VanishingMomentsSpec {
    pub fn new(p_max: usize, cutoff_width: f64, grid_spacing: f64) -> Self {
        VanishingMomentsSpec {
            cutoff_width,
            sigma: cutoff_width,
            freq_shift: 0.0,
            p_max,
            moment_tol: 1e-8,
            grid_spacing,
        }
    }

    pub fn with_freq_shift(mut self, xi0: f64) -> Self {
        self.freq_shift = xi0;
        self
    }
}

/// Build a vanishing-moments kernel. See the module docs for the
/// construction; errors if the requested moments fail their tolerance.
pub fn build_vanishing_moments(
    p_max: usize,
    cutoff_width: f64,
    grid_spacing: f64,
) -> Result<Mollifier> {
    build_vanishing_moments_spec(&VanishingMomentsSpec::new(p_max, cutoff_width, grid_spacing))
}

pub fn build_vanishing_moments_spec(spec: &VanishingMomentsSpec) -> Result<Mollifier> {
    let w = spec.cutoff_width;
    let sigma = spec.sigma;
    if !(w > 0.0) || !(sigma > 0.0) {
        return Err(Error::Config(
            "cutoff width and sigma must be positive".into(),
        ));
    }
    if spec.p_max < 1 {
        return Err(Error::Config("p_max must be >= 1".into()));
    }
    if spec.freq_shift.abs() > 0.5 * w {
        return Err(Error::Config(format!(
            "frequency shift {} moves the plateau off the origin (|shift| <= w/2 required)",
            spec.freq_shift
        )));
    }
    let b = w + 6.0 * sigma;
    let cap = b + 6.0 * sigma + spec.freq_shift.abs();

    // truncation radius: first X with tail bound
    //   int_X^inf exp(-sigma^2 x^2/4)/(pi x) dx <= exp(-sigma^2X^2/4) * 4/(pi sigma^2 X^2)
    // below 1e-12 (doubled for the two tails).
    let mut trunc = 4.0 / sigma;
    let tail_bound = |x: f64| {
        2.0 * (-sigma * sigma * x * x / 4.0).exp() * 4.0
            / (std::f64::consts::PI * sigma * sigma * x * x)
    };
    while tail_bound(trunc) > 1e-12 {
        trunc += 0.5 / sigma;
        if trunc > 1e4 {
            return Err(Error::Construction(
                "could not certify a truncation radius".into(),
            ));
        }
    }

    let h = spec.grid_spacing;
    // kernel sampling must resolve the top frequency of the plateau
    if h >= std::f64::consts::PI / cap {
        return Err(Error::Resolution(format!(
            "grid spacing {h} does not resolve the frequency support {cap:.2} (need h < pi/{cap:.2})"
        )));
    }
    let half = (trunc / h).ceil() as usize;
    let n = 2 * half + 1;
    let support_radius = half as f64 * h;

    // plateau samples for the inverse-FT quadrature
    let nxi = 8192usize;
    let dxi = 2.0 * cap / nxi as f64;
    let xi: Vec<f64> = (0..=nxi).map(|m| -cap + m as f64 * dxi).collect();
    let rho: Vec<f64> = xi
        .iter()
        .map(|&x| 0.5 * (erf((x - spec.freq_shift + b) / sigma) - erf((x - spec.freq_shift - b) / sigma)))
        .collect();

    let ift = |x: f64, power: u32| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (m, (&f, &r)) in xi.iter().zip(&rho).enumerate() {
            let wq = if m == 0 || m == nxi { 0.5 } else { 1.0 };
            let phase = C64::new(0.0, x * f).exp();
            let mult = C64::new(0.0, f).powu(power);
            acc += phase * mult * (r * wq);
        }
        acc * (dxi / (2.0 * std::f64::consts::PI))
    };

    let xs: Vec<f64> = (0..n).map(|j| -support_radius + j as f64 * h).collect();
    let samples: Vec<C64> = xs.iter().map(|&x| ift(x, 0)).collect();
    let deriv1: Vec<C64> = xs.iter().map(|&x| ift(x, 1)).collect();
    let deriv2: Vec<C64> = xs.iter().map(|&x| ift(x, 2)).collect();

    let mut m = Mollifier {
        kind: MollifierKind::VanishingMoments,
        support_radius,
        grid_spacing: h,
        samples,
        deriv1,
        deriv2,
        cumulative: Vec::new(),
        moment_table: Vec::new(),
        quad_tol: spec.moment_tol,
        tail_mass_bound: tail_bound(trunc),
        id: if spec.freq_shift == 0.0 {
            format!("vm_w{w:.2}_s{sigma:.2}")
        } else {
            format!("vm_w{w:.2}_s{sigma:.2}_x{:.2}", spec.freq_shift)
        },
        shape: Shape::Sampled,
    };
    m.recompute_tables(spec.p_max.max(4));

    let mass_err = (m.moment_table[0] - C64::new(1.0, 0.0)).norm();
    if mass_err > spec.moment_tol {
        return Err(Error::Construction(format!(
            "vanishing-moments kernel mass off by {mass_err:.3e}"
        )));
    }
    let mut worst = (0usize, 0.0f64);
    for k in 1..=spec.p_max {
        let mag = m.moment_table[k].norm();
        if mag > worst.1 {
            worst = (k, mag);
        }
    }
    if worst.1 > spec.moment_tol {
        return Err(Error::Construction(format!(
            "moment {} = {:.3e} exceeds tolerance {:.1e}",
            worst.0, worst.1, spec.moment_tol
        )));
    }
    Ok(m)
}

/// Closed form of the unshifted kernel, used as an independent oracle in
/// tests: `sin(bx)/(pi x) * exp(-sigma^2 x^2/4)` with `b = w + 6 sigma`.
pub fn sinc_gauss_closed_form(cutoff_width: f64, sigma: f64, x: f64) -> f64 {
    let b = cutoff_width + 6.0 * sigma;
    let sinc = if x.abs() < 1e-12 {
        b / std::f64::consts::PI
    } else {
        (b * x).sin() / (std::f64::consts::PI * x)
    };
    sinc * (-sigma * sigma * x * x / 4.0).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn erf_reference_values() {
        assert_abs_diff_eq!(erf(0.5), 0.5204998778130465, epsilon = 1e-14);
        assert_abs_diff_eq!(erf(1.0), 0.8427007929497149, epsilon = 1e-14);
        assert_abs_diff_eq!(erf(2.0), 0.9953222650189527, epsilon = 1e-14);
        assert_abs_diff_eq!(erf(4.0), 0.9999999845827421, epsilon = 1e-15);
        assert_abs_diff_eq!(erf(-1.0), -0.8427007929497149, epsilon = 1e-14);
    }

    #[test]
    fn moments_certified() {
        let m = build_vanishing_moments(4, 1.0, 1.0 / 16.0).unwrap();
        assert!((m.moment_table[0] - C64::new(1.0, 0.0)).norm() <= 1e-8);
        for k in 1..=4 {
            assert!(
                m.moment_table[k].norm() <= 1e-8,
                "moment {k} = {:.3e}",
                m.moment_table[k].norm()
            );
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let m = build_vanishing_moments(4, 1.0, 1.0 / 16.0).unwrap();
        let mut worst = 0.0f64;
        for (x, v) in m.abscissae().zip(&m.samples) {
            let c = sinc_gauss_closed_form(1.0, 1.0, x);
            worst = worst.max((v - C64::new(c, 0.0)).norm());
        }
        assert!(worst < 1e-10, "worst deviation {worst:.3e}");
    }

    #[test]
    fn kernel_takes_negative_values() {
        let m = build_vanishing_moments(4, 1.0, 1.0 / 16.0).unwrap();
        assert!(m.samples.iter().any(|v| v.re < -1e-3));
        assert!(!m.is_positive());
    }

    #[test]
    fn complex_variant_keeps_moments() {
        let spec = VanishingMomentsSpec::new(4, 1.0, 1.0 / 16.0).with_freq_shift(0.4);
        let m = build_vanishing_moments_spec(&spec).unwrap();
        assert!(m.samples.iter().any(|v| v.im.abs() > 1e-3));
        assert!((m.moment_table[0] - C64::new(1.0, 0.0)).norm() <= 1e-8);
        for k in 1..=4 {
            assert!(m.moment_table[k].norm() <= 1e-8);
        }
    }

    #[test]
    fn moment_failure_is_loud() {
        // an impossible tolerance must be rejected with the worst moment named
        let mut spec = VanishingMomentsSpec::new(4, 1.0, 1.0 / 16.0);
        spec.moment_tol = 1e-18;
        match build_vanishing_moments_spec(&spec) {
            Err(Error::Construction(msg)) => assert!(msg.contains("moment") || msg.contains("mass")),
            other => panic!("expected construction error, got {other:?}"),
        }
    }
}
