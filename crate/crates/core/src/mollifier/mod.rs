//! Mollifiers: smoothing kernels, positive scales, and convolution.
//!
//! A [`Mollifier`] is a unit-mass kernel sampled on a uniform grid over
//! `[-R, R]` together with certified moment and derivative tables. Two
//! families are built here:
//!
//! * compact bumps `A exp(-k/(1-((x-c)/r)^2))`, non-negative and compactly
//!   supported (see [`bump`]);
//! * vanishing-moments kernels obtained as the inverse Fourier transform of a
//!   frequency plateau identically 1 around the origin (see [`vanishing`]).
//!   These take negative (and, with a frequency shift, complex) values.
//!
//! Scaling follows `phi_omega(x) = omega^{-1} phi(x/omega)` per axis. In `n`
//! dimensions the regularizer is the tensor product of per-axis scaled
//! profiles, which carries the mass-preserving `omega^{-n}` normalization.

mod bump;
mod vanishing;

pub use bump::{build_bump, build_bump_at, build_bump_matched_deriv_sup, build_bump_sharp};
pub use vanishing::{
    build_vanishing_moments, build_vanishing_moments_spec, sinc_gauss_closed_form,
    VanishingMomentsSpec,
};

use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::grid::{BoundaryMode, Grid};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierKind {
    CompactBump,
    VanishingMoments,
}

/// Closed-form evaluators attached to a kernel where available.
#[derive(Debug, Clone)]
pub(crate) enum Shape {
    /// `amp * exp(-sharp/(1 - z^2))`, `z = (x-center)/radius`.
    BumpExp {
        radius: f64,
        center: f64,
        sharp: f64,
        amp: f64,
    },
    /// Only the sample tables are available; evaluation interpolates.
    Sampled,
}

#[derive(Debug, Clone)]
pub struct Mollifier {
    pub kind: MollifierKind,
    /// Samples cover `[-support_radius, support_radius]` inclusive.
    pub support_radius: f64,
    pub grid_spacing: f64,
    pub samples: Vec<C64>,
    /// First and second derivative samples on the same grid.
    pub deriv1: Vec<C64>,
    pub deriv2: Vec<C64>,
    /// Trapezoid antiderivative from the left end; last entry is the mass.
    cumulative: Vec<C64>,
    /// Moments `int x^k phi dx` for `k = 0..=p_max`, by trapezoid quadrature.
    pub moment_table: Vec<C64>,
    /// Declared quadrature tolerance for the mass and moment certificates.
    pub quad_tol: f64,
    /// Certified bound on the kernel mass discarded by domain truncation
    /// (zero for compactly supported kernels).
    pub tail_mass_bound: f64,
    pub id: String,
    pub(crate) shape: Shape,
}

impl Mollifier {
    /// Number of samples (grid covers `[-R, R]` inclusive).
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Kernel abscissae.
    pub fn abscissae(&self) -> impl Iterator<Item = f64> + '_ {
        let (r, h) = (self.support_radius, self.grid_spacing);
        (0..self.len()).map(move |j| -r + j as f64 * h)
    }

    /// Trapezoid quadrature against the kernel samples.
    pub(crate) fn quad(&self, values: impl Iterator<Item = C64>) -> C64 {
        let n = self.len();
        let mut acc = C64::new(0.0, 0.0);
        for (j, v) in values.enumerate() {
            let w = if j == 0 || j + 1 == n { 0.5 } else { 1.0 };
            acc += v * w;
        }
        acc * self.grid_spacing
    }

    pub(crate) fn recompute_tables(&mut self, p_max: usize) {
        let n = self.len();
        // cumulative trapezoid
        let mut cum = Vec::with_capacity(n);
        let mut acc = C64::new(0.0, 0.0);
        cum.push(acc);
        for j in 1..n {
            acc += (self.samples[j - 1] + self.samples[j]) * 0.5 * self.grid_spacing;
            cum.push(acc);
        }
        self.cumulative = cum;
        // moments
        let mut moments = Vec::with_capacity(p_max + 1);
        for k in 0..=p_max {
            let m = self.quad(
                self.abscissae()
                    .zip(&self.samples)
                    .map(|(x, &phi)| phi * x.powi(k as i32)),
            );
            moments.push(m);
        }
        self.moment_table = moments;
    }

    /// Kernel mass `int phi` from the cumulative table.
    pub fn mass(&self) -> C64 {
        *self.cumulative.last().expect("non-empty kernel")
    }

    /// Evaluate the kernel at an arbitrary point (analytic where the shape
    /// permits, cubic interpolation of the samples otherwise).
    pub fn eval(&self, x: f64) -> C64 {
        match &self.shape {
            Shape::BumpExp {
                radius,
                center,
                sharp,
                amp,
            } => {
                let z = (x - center) / radius;
                if z.abs() >= 1.0 {
                    C64::new(0.0, 0.0)
                } else {
                    C64::new(amp * (-sharp / (1.0 - z * z)).exp(), 0.0)
                }
            }
            Shape::Sampled => self.interp(&self.samples, x),
        }
    }

    /// First derivative at an arbitrary point.
    pub fn eval_deriv1(&self, x: f64) -> C64 {
        match &self.shape {
            Shape::BumpExp { radius, center, .. } => {
                let z = (x - center) / radius;
                if z.abs() >= 1.0 {
                    C64::new(0.0, 0.0)
                } else {
                    let s = 1.0 - z * z;
                    let sharp = match &self.shape {
                        Shape::BumpExp { sharp, .. } => *sharp,
                        _ => unreachable!(),
                    };
                    self.eval(x) * (-2.0 * sharp * z / (s * s)) / radius
                }
            }
            Shape::Sampled => self.interp(&self.deriv1, x),
        }
    }

    /// Catmull-Rom interpolation on a sample table.
    fn interp(&self, table: &[C64], x: f64) -> C64 {
        let t = (x + self.support_radius) / self.grid_spacing;
        if t <= 0.0 || t >= (self.len() - 1) as f64 {
            return C64::new(0.0, 0.0);
        }
        let j = t.floor() as usize;
        let f = t - j as f64;
        let p1 = table[j];
        let p2 = table[j + 1];
        let p0 = if j > 0 { table[j - 1] } else { p1 };
        let p3 = if j + 2 < self.len() { table[j + 2] } else { p2 };
        0.5 * ((2.0 * p1)
            + (p2 - p0) * f
            + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * (f * f)
            + (3.0 * p1 - p0 - 3.0 * p2 + p3) * (f * f * f))
    }

    /// `int_{-R}^{s} phi`, saturating outside the sampled domain. Piecewise
    /// quadratic, consistent with the trapezoid cumulative table.
    pub fn antiderivative(&self, s: f64) -> C64 {
        if s <= -self.support_radius {
            return C64::new(0.0, 0.0);
        }
        if s >= self.support_radius {
            return self.mass();
        }
        let t = (s + self.support_radius) / self.grid_spacing;
        let j = (t.floor() as usize).min(self.len() - 2);
        let f = t - j as f64;
        let a = self.samples[j];
        let b = self.samples[j + 1];
        self.cumulative[j] + (a * f + (b - a) * (0.5 * f * f)) * self.grid_spacing
    }

    /// Sup of `|phi|` with 3-point parabola refinement around the grid max.
    pub fn sup(&self) -> f64 {
        refined_sup(&self.samples)
    }

    /// Sup of `|phi'|` with parabola refinement.
    pub fn deriv1_sup(&self) -> f64 {
        refined_sup(&self.deriv1)
    }

    /// Sup of `|phi''|` with parabola refinement.
    pub fn deriv2_sup(&self) -> f64 {
        refined_sup(&self.deriv2)
    }

    /// True if the kernel is (numerically) non-negative real.
    pub fn is_positive(&self) -> bool {
        self.samples
            .iter()
            .all(|v| v.re >= -1e-14 && v.im.abs() <= 1e-14)
    }

    /// Scaled kernel `omega^{-1} phi(x/omega)` on the correspondingly scaled
    /// sample grid; mass and cumulative are preserved exactly, moments scale
    /// as `omega^k m_k`.
    pub fn scale(&self, omega: f64) -> Result<Mollifier> {
        if !(omega > 0.0) {
            return Err(Error::Config(format!("scale omega = {omega} must be positive")));
        }
        let inv = 1.0 / omega;
        let shape = match &self.shape {
            Shape::BumpExp {
                radius,
                center,
                sharp,
                amp,
            } => Shape::BumpExp {
                radius: radius * omega,
                center: center * omega,
                sharp: *sharp,
                amp: amp * inv,
            },
            Shape::Sampled => Shape::Sampled,
        };
        Ok(Mollifier {
            kind: self.kind,
            support_radius: self.support_radius * omega,
            grid_spacing: self.grid_spacing * omega,
            samples: self.samples.iter().map(|v| v * inv).collect(),
            deriv1: self.deriv1.iter().map(|v| v * inv * inv).collect(),
            deriv2: self.deriv2.iter().map(|v| v * inv * inv * inv).collect(),
            cumulative: self.cumulative.clone(),
            moment_table: self
                .moment_table
                .iter()
                .enumerate()
                .map(|(k, m)| m * omega.powi(k as i32))
                .collect(),
            quad_tol: self.quad_tol,
            tail_mass_bound: self.tail_mass_bound,
            id: self.id.clone(),
            shape,
        })
    }

    /// Export as CSV with columns `x, re(phi), im(phi)`.
    pub fn export_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,re_phi,im_phi")?;
        for (x, v) in self.abscissae().zip(&self.samples) {
            writeln!(w, "{},{},{}", x, v.re, v.im)?;
        }
        Ok(())
    }

    /// Import a kernel previously written by [`Mollifier::export_csv`].
    /// Derivative tables are rebuilt by 4th-order central differences.
    pub fn import_csv<R: BufRead>(r: R, kind: MollifierKind, quad_tol: f64) -> Result<Mollifier> {
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (ln, line) in r.lines().enumerate() {
            let line = line?;
            if ln == 0 && line.starts_with('x') {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Construction(format!(
                    "kernel CSV line {} has {} columns, expected 3",
                    ln + 1,
                    parts.len()
                )));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Construction(format!("bad float in kernel CSV: {e}")))
            };
            xs.push(parse(parts[0])?);
            vs.push(C64::new(parse(parts[1])?, parse(parts[2])?));
        }
        if xs.len() < 17 {
            return Err(Error::Resolution(format!(
                "imported kernel has only {} samples",
                xs.len()
            )));
        }
        let h = xs[1] - xs[0];
        let r = -xs[0];
        let mut m = Mollifier {
            kind,
            support_radius: r,
            grid_spacing: h,
            deriv1: central_diff(&vs, h, 1),
            deriv2: central_diff(&vs, h, 2),
            samples: vs,
            cumulative: Vec::new(),
            moment_table: Vec::new(),
            quad_tol,
            tail_mass_bound: 0.0,
            id: "imported".into(),
            shape: Shape::Sampled,
        };
        m.recompute_tables(4);
        if (m.mass() - C64::new(1.0, 0.0)).norm() > quad_tol.max(1e-8) {
            return Err(Error::Construction(format!(
                "imported kernel mass {} is not 1 within tolerance",
                m.mass()
            )));
        }
        Ok(m)
    }
}

/// Max of `|g|` over a sample table, refined by the parabola through the
/// squared modulus at the three points around the grid argmax.
pub(crate) fn refined_sup(table: &[C64]) -> f64 {
    let mut best = 0.0f64;
    let mut at = 0usize;
    for (j, v) in table.iter().enumerate() {
        let m = v.norm_sqr();
        if m > best {
            best = m;
            at = j;
        }
    }
    if at == 0 || at + 1 == table.len() {
        return best.sqrt();
    }
    let (l, c, r) = (
        table[at - 1].norm_sqr(),
        table[at].norm_sqr(),
        table[at + 1].norm_sqr(),
    );
    let a = 0.5 * (l + r) - c;
    if a >= 0.0 {
        return best.sqrt();
    }
    let b = 0.5 * (r - l);
    (c - b * b / (4.0 * a)).max(best).sqrt()
}

fn central_diff(v: &[C64], h: f64, order: u32) -> Vec<C64> {
    let n = v.len();
    let at = |i: isize| -> C64 {
        if i < 0 || i >= n as isize {
            C64::new(0.0, 0.0)
        } else {
            v[i as usize]
        }
    };
    (0..n as isize)
        .map(|i| match order {
            1 => (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h),
            2 => {
                (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2))
                    / (12.0 * h * h)
            }
            _ => unreachable!(),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// positive scales
// ---------------------------------------------------------------------------

/// Splice point below which `1/ln(ln(1/eps))` is both positive and <= 1.
pub const LOGLOG_SPLICE: f64 = 0.065988035845312537; // exp(-e)
/// Splice point below which `1/sqrt(ln(1/eps))` is <= 1.
pub const SQRTLOG_SPLICE: f64 = 0.36787944117144233; // exp(-1)

/// The rate `omega(eps)` at which kernels shrink along the ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PositiveScale {
    /// `omega = eps^r`.
    Power { exponent: f64 },
    /// `omega = 1/ln(ln(1/eps))` below the splice point, 1 above.
    LogLog {
        #[serde(default = "default_loglog_splice")]
        splice: f64,
    },
    /// `omega = 1/sqrt(ln(1/eps))` below the splice point, 1 above
    /// (equivalently `omega^{-2} = ln(1/eps)`).
    SqrtLog {
        #[serde(default = "default_sqrtlog_splice")]
        splice: f64,
    },
    /// An arbitrary scale frozen to its splice-point value above the splice.
    ConstantSpliced {
        base: Box<PositiveScale>,
        splice: f64,
    },
}

fn default_loglog_splice() -> f64 {
    LOGLOG_SPLICE
}
fn default_sqrtlog_splice() -> f64 {
    SQRTLOG_SPLICE
}

impl PositiveScale {
    pub fn power(r: f64) -> Self {
        PositiveScale::Power { exponent: r }
    }

    pub fn loglog() -> Self {
        PositiveScale::LogLog {
            splice: LOGLOG_SPLICE,
        }
    }

    pub fn sqrtlog() -> Self {
        PositiveScale::SqrtLog {
            splice: SQRTLOG_SPLICE,
        }
    }

    pub fn omega(&self, eps: f64) -> f64 {
        match self {
            PositiveScale::Power { exponent } => eps.powf(*exponent),
            PositiveScale::LogLog { splice } => {
                if eps >= *splice {
                    1.0 / (1.0 / splice).ln().ln().max(1.0)
                } else {
                    1.0 / (1.0 / eps).ln().ln()
                }
            }
            PositiveScale::SqrtLog { splice } => {
                if eps >= *splice {
                    1.0 / (1.0 / splice).ln().sqrt().max(1.0)
                } else {
                    1.0 / (1.0 / eps).ln().sqrt()
                }
            }
            PositiveScale::ConstantSpliced { base, splice } => base.omega(eps.min(*splice)),
        }
    }

    pub fn id(&self) -> String {
        match self {
            PositiveScale::Power { exponent } => format!("pow{exponent:.3}"),
            PositiveScale::LogLog { .. } => "loglog".into(),
            PositiveScale::SqrtLog { .. } => "sqrtlog".into(),
            PositiveScale::ConstantSpliced { base, splice } => {
                format!("spliced_{}_{splice:.3}", base.id())
            }
        }
    }

    /// Check the sandwich `c2*eps^r <= omega(eps) <= c1` over a ladder.
    pub fn verify_sandwich(&self, ladder: &[f64], r: f64, c1: f64, c2: f64) -> Result<()> {
        for &eps in ladder {
            let w = self.omega(eps);
            if !(w > 0.0) {
                return Err(Error::Config(format!(
                    "omega({eps}) = {w} is not positive"
                )));
            }
            if w > c1 + 1e-12 || w < c2 * eps.powf(r) - 1e-12 {
                return Err(Error::Config(format!(
                    "sandwich violated at eps = {eps}: omega = {w}, bounds [{}, {c1}]",
                    c2 * eps.powf(r)
                )));
            }
        }
        Ok(())
    }
}

/// Default geometric ladder `eps_j = 2^{-j}` for `j = lo..=hi`.
pub fn geometric_ladder(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|j| 2f64.powi(-(j as i32))).collect()
}

// ---------------------------------------------------------------------------
// distribution descriptors and convolution
// ---------------------------------------------------------------------------

/// Analytic descriptors of the distributions the crate can regularize
/// exactly. Closed under finite sums; anything else must arrive as samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Distribution {
    /// `H(x - location)`: 0 to the left of the jump, 1 to the right.
    Heaviside {
        #[serde(default)]
        location: f64,
    },
    /// `weight * delta(x - location)`.
    PointMass { location: f64, weight: f64 },
    /// Box indicator `amplitude * 1_{[a, b]}`.
    Box { a: f64, b: f64, amplitude: f64 },
    Sum { terms: Vec<Distribution> },
}

impl Distribution {
    /// Largest feature coordinate, used for domain checks.
    fn feature_radius(&self) -> f64 {
        match self {
            Distribution::Heaviside { location } => location.abs(),
            Distribution::PointMass { location, .. } => location.abs(),
            Distribution::Box { a, b, .. } => a.abs().max(b.abs()),
            Distribution::Sum { terms } => terms
                .iter()
                .map(|t| t.feature_radius())
                .fold(0.0, f64::max),
        }
    }

    /// `(u * phi_omega)(x)` via analytic fast paths.
    pub fn convolve_at(&self, m: &Mollifier, omega: f64, x: f64) -> C64 {
        match self {
            Distribution::Heaviside { location } => m.antiderivative((x - location) / omega),
            Distribution::PointMass { location, weight } => {
                m.eval((x - location) / omega) * (*weight / omega)
            }
            Distribution::Box { a, b, amplitude } => {
                (m.antiderivative((x - a) / omega) - m.antiderivative((x - b) / omega)) * *amplitude
            }
            Distribution::Sum { terms } => terms
                .iter()
                .map(|t| t.convolve_at(m, omega, x))
                .fold(C64::new(0.0, 0.0), |acc, v| acc + v),
        }
    }

    /// Derivative `d^order/dx^order (u * phi_omega)(x)` via the kernel
    /// derivative tables (exact for distributions).
    pub fn convolve_deriv_at(&self, m: &Mollifier, omega: f64, x: f64, order: u32) -> C64 {
        match self {
            Distribution::Heaviside { location } => {
                let z = (x - location) / omega;
                match order {
                    0 => m.antiderivative(z),
                    1 => m.eval(z) / omega,
                    2 => m.eval_deriv1(z) / (omega * omega),
                    _ => unreachable!("orders 0..=2 supported"),
                }
            }
            Distribution::PointMass { location, weight } => {
                let z = (x - location) / omega;
                let w = *weight;
                match order {
                    0 => m.eval(z) * (w / omega),
                    1 => m.eval_deriv1(z) * (w / omega.powi(2)),
                    2 => m.interp_deriv2(z) * (w / omega.powi(3)),
                    _ => unreachable!(),
                }
            }
            Distribution::Box { a, b, amplitude } => {
                let d = |loc: f64| {
                    Distribution::Heaviside { location: loc }.convolve_deriv_at(m, omega, x, order)
                };
                (d(*a) - d(*b)) * *amplitude
            }
            Distribution::Sum { terms } => terms
                .iter()
                .map(|t| t.convolve_deriv_at(m, omega, x, order))
                .fold(C64::new(0.0, 0.0), |acc, v| acc + v),
        }
    }
}

impl Mollifier {
    fn interp_deriv2(&self, z: f64) -> C64 {
        match &self.shape {
            Shape::BumpExp {
                radius,
                center,
                sharp,
                ..
            } => {
                let zz = (z - center) / radius;
                if zz.abs() >= 1.0 {
                    C64::new(0.0, 0.0)
                } else {
                    let s = 1.0 - zz * zz;
                    let g1 = -2.0 * sharp * zz / (s * s);
                    let g2 = -2.0 * sharp * (1.0 + 3.0 * zz * zz) / (s * s * s);
                    self.eval(z) * (g1 * g1 + g2) / (radius * radius)
                }
            }
            Shape::Sampled => self.interp(&self.deriv2, z),
        }
    }
}

/// Input to [`convolve`]: grid samples, an analytic function, or a
/// distribution descriptor.
pub enum ConvolutionInput<'a> {
    Samples {
        values: &'a [C64],
        grid: &'a Grid,
    },
    Function(&'a dyn Fn(f64) -> f64),
    Distribution(&'a Distribution),
}

/// `f * phi_omega` sampled on `out`, 1D.
///
/// Quadrature runs over the kernel's own grid:
/// `(f*phi_omega)(x) = h_k sum_j f(x - omega y_j) phi(y_j)`, with `f`
/// evaluated exactly (functions), by linear interpolation (samples), or via
/// the antiderivative/point fast paths (distributions).
pub fn convolve(
    input: &ConvolutionInput<'_>,
    m: &Mollifier,
    omega: f64,
    out: &Grid,
) -> Result<Vec<C64>> {
    if out.dim != 1 {
        return Err(Error::Config("convolve output grid must be 1D".into()));
    }
    if !(omega > 0.0) {
        return Err(Error::Config(format!("omega = {omega} must be positive")));
    }
    let smear = omega * m.support_radius;
    if let ConvolutionInput::Distribution(d) = input {
        if d.feature_radius() + smear > out.extent {
            return Err(Error::Domain(format!(
                "smeared support {:.3} does not fit in the output domain {:.3}",
                d.feature_radius() + smear,
                out.extent
            )));
        }
        return Ok((0..out.points)
            .map(|i| d.convolve_at(m, omega, out.coord(i)))
            .collect());
    }
    // sampled inputs lose mass once the smearing reaches beyond the domain;
    // analytic functions are evaluable everywhere and need no such check
    if matches!(input, ConvolutionInput::Samples { .. }) && smear >= out.extent {
        return Err(Error::Domain(format!(
            "kernel smearing radius {smear:.3} exceeds output half-extent {:.3}",
            out.extent
        )));
    }

    let eval_f: Box<dyn Fn(f64) -> C64> = match input {
        ConvolutionInput::Function(f) => Box::new(move |x| C64::new(f(x), 0.0)),
        ConvolutionInput::Samples { values, grid } => {
            let (values, grid) = (values.to_vec(), (*grid).clone());
            Box::new(move |x| sample_interp(&values, &grid, x))
        }
        ConvolutionInput::Distribution(_) => unreachable!(),
    };

    let ys: Vec<f64> = m.abscissae().collect();
    Ok((0..out.points)
        .map(|i| {
            let x = out.coord(i);
            m.quad(
                ys.iter()
                    .zip(&m.samples)
                    .map(|(&y, &phi)| eval_f(x - omega * y) * phi),
            )
        })
        .collect())
}

/// Linear interpolation of grid samples; periodic wrap or zero outside.
fn sample_interp(values: &[C64], grid: &Grid, x: f64) -> C64 {
    let n = grid.points as isize;
    let t = (x + grid.extent) / grid.spacing();
    match grid.boundary {
        BoundaryMode::Periodic => {
            let tf = t.rem_euclid(n as f64);
            let j = tf.floor() as isize;
            let f = tf - j as f64;
            let a = values[(j.rem_euclid(n)) as usize];
            let b = values[((j + 1).rem_euclid(n)) as usize];
            a + (b - a) * f
        }
        BoundaryMode::ZeroPadded => {
            if t < 0.0 || t > (n - 1) as f64 {
                return C64::new(0.0, 0.0);
            }
            let j = (t.floor() as isize).min(n - 2);
            let f = t - j as f64;
            let a = values[j as usize];
            let b = values[(j + 1) as usize];
            a + (b - a) * f
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Frozen by an independent high-precision quadrature:
    //   int_{-1}^{1} exp(-1/(1-x^2)) dx = 0.44399381616807944
    //   peak of the normalized bump  = 0.82856883986910515
    //   second moment m2             = 0.15811363626379823
    //   sup |phi'|                   = 1.79829025260870735
    const BUMP_PEAK: f64 = 0.8285688398691052;
    const BUMP_M2: f64 = 0.15811363626379823;
    const BUMP_DERIV_SUP: f64 = 1.7982902526087073;

    fn std_bump() -> Mollifier {
        build_bump(1.0, 1.0 / 256.0).unwrap()
    }

    #[test]
    fn bump_mass_and_first_moment() {
        let m = std_bump();
        assert!((m.moment_table[0] - C64::new(1.0, 0.0)).norm() <= 1e-10);
        assert!(m.moment_table[1].norm() <= 1e-10);
    }

    #[test]
    fn bump_peak_matches_oracle() {
        let m = std_bump();
        assert_abs_diff_eq!(m.eval(0.0).re, BUMP_PEAK, epsilon = 1e-9);
        assert_abs_diff_eq!(m.sup(), BUMP_PEAK, epsilon = 1e-9);
    }

    #[test]
    fn bump_second_moment_matches_oracle() {
        let m = std_bump();
        assert_abs_diff_eq!(m.moment_table[2].re, BUMP_M2, epsilon = 1e-10);
    }

    #[test]
    fn bump_deriv_sup_matches_oracle() {
        // parabola refinement converges like h^4: 1/256 is good to ~4e-6,
        // 1/2048 to ~1e-9
        let coarse = std_bump();
        assert_abs_diff_eq!(coarse.deriv1_sup(), BUMP_DERIV_SUP, epsilon = 1e-5);
        let fine = build_bump(1.0, 1.0 / 2048.0).unwrap();
        assert_abs_diff_eq!(fine.deriv1_sup(), BUMP_DERIV_SUP, epsilon = 1e-8);
    }

    #[test]
    fn bump_nonnegative_and_compact() {
        let m = std_bump();
        assert!(m.is_positive());
        assert_eq!(m.eval(1.0001).re, 0.0);
        assert_eq!(m.eval(-2.0).re, 0.0);
    }

    #[test]
    fn under_resolved_rejected() {
        assert!(matches!(
            build_bump(1.0, 0.2),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn scale_identity_and_halving() {
        let m = std_bump();
        let same = m.scale(1.0).unwrap();
        assert_eq!(same.samples, m.samples);
        let half = m.scale(0.5).unwrap();
        assert_abs_diff_eq!(half.eval(0.0).re, 2.0 * m.eval(0.0).re, epsilon = 1e-12);
        assert_abs_diff_eq!(half.support_radius, 0.5, epsilon = 1e-15);
        assert!((half.mass() - C64::new(1.0, 0.0)).norm() <= 1e-10);
    }

    #[test]
    fn tensor_mass_in_two_dims() {
        // omega^{-n} normalization: per-axis scaled profiles multiply to a
        // unit-mass kernel in 2D.
        let m = std_bump().scale(0.25).unwrap();
        let mass = m.mass();
        assert!(((mass * mass) - C64::new(1.0, 0.0)).norm() <= 1e-9);
    }

    #[test]
    fn heaviside_at_origin_is_half() {
        let m = std_bump();
        let d = Distribution::Heaviside { location: 0.0 };
        for omega in [1.0, 0.5, 0.03] {
            assert_abs_diff_eq!(d.convolve_at(&m, omega, 0.0).re, 0.5, epsilon = 1e-9);
        }
    }

    #[test]
    fn point_mass_reproduces_kernel() {
        let m = std_bump();
        let d = Distribution::PointMass {
            location: 0.0,
            weight: 1.0,
        };
        assert_abs_diff_eq!(d.convolve_at(&m, 1.0, 0.0).re, m.eval(0.0).re, epsilon = 1e-12);
        // omega = 1/2 doubles the peak
        assert_abs_diff_eq!(
            d.convolve_at(&m, 0.5, 0.0).re,
            2.0 * m.eval(0.0).re,
            epsilon = 1e-12
        );
    }

    #[test]
    fn x_squared_convolution_is_omega_sq_m2() {
        let m = std_bump();
        let g = Grid::new_1d(64, 4.0, BoundaryMode::ZeroPadded);
        for omega in [1.0, 0.5, 0.25] {
            let f = |x: f64| x * x;
            let out = convolve(&ConvolutionInput::Function(&f), &m, omega, &g).unwrap();
            let i0 = g.axis().iter().position(|&x| x.abs() < 1e-12).unwrap();
            assert_abs_diff_eq!(out[i0].re, omega * omega * BUMP_M2, epsilon = 1e-9);
        }
    }

    #[test]
    fn scales_shrink_and_splice() {
        let ll = PositiveScale::loglog();
        assert_abs_diff_eq!(ll.omega(LOGLOG_SPLICE * 0.999999), 1.0, epsilon = 1e-4);
        assert!(ll.omega(1e-6) < 1.0);
        let sl = PositiveScale::sqrtlog();
        assert!(sl.omega(0.5) == 1.0);
        assert!((sl.omega(2f64.powi(-9)) - 1.0 / (2f64.powi(9) as f64).ln().sqrt()).abs() < 1e-12);
        PositiveScale::power(1.0)
            .verify_sandwich(&geometric_ladder(2, 9), 1.0, 1.0, 1.0)
            .unwrap();
    }

    #[test]
    fn shifted_bump_first_moment_is_center() {
        let m = build_bump_at(1.0, 0.5, 1.0 / 256.0).unwrap();
        assert_abs_diff_eq!(m.moment_table[1].re, 0.5, epsilon = 1e-9);
        assert!(m.is_positive());
    }

    #[test]
    fn csv_round_trip() {
        let m = std_bump();
        let mut buf = Vec::new();
        m.export_csv(&mut buf).unwrap();
        let back =
            Mollifier::import_csv(std::io::BufReader::new(&buf[..]), m.kind, 1e-8).unwrap();
        assert_eq!(back.len(), m.len());
        assert!((back.mass() - m.mass()).norm() < 1e-10);
    }
}
