//! Leapfrog solver for the regularized Cauchy problem in 1 and 2 space
//! dimensions.
//!
//! Time stepping works on the scalar second-order form
//! `u_tt = sum_i a_i(x) u_{x_i x_i} + f`, not on the first-order system: the
//! system reduction is used for verification and energy computation, and
//! [`state_vector`] reconciles the two. The scheme is the classical explicit
//! leapfrog `u^{m+1} = 2u^m - u^{m-1} + dt^2 (sum_i a_i D2_i u^m + f(t_m))`
//! with a Taylor-seeded first step, 3-point second differences per axis and
//! one `dt` for the whole epsilon-sweep (CFL over the ladder maximum), so
//! traces are comparable across rungs. Fields are complex end-to-end;
//! coefficients are real and non-negative.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::RegularizedNet;
use crate::error::{Error, Result};
use crate::fourier::spectral_derivative;
use crate::grid::{BoundaryMode, Grid};
use crate::mollifier::{convolve, ConvolutionInput, Distribution, Mollifier};
use crate::system::StateVector;
use crate::C64;

// ---------------------------------------------------------------------------
// data descriptors and nets
// ---------------------------------------------------------------------------

/// Spatial profiles for initial data and forcing.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DataField {
    Zero,
    Gaussian {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    /// `amplitude * exp(-1/(1-((x-center)/radius)^2))` inside the radius.
    Bump {
        center: f64,
        radius: f64,
        amplitude: f64,
    },
    /// `amplitude * sin(freq * x)`; periodic grids only.
    SineMode { freq: f64, amplitude: f64 },
    Box {
        a: f64,
        b: f64,
        amplitude: f64,
    },
    PointMass { location: f64, weight: f64 },
}

impl DataField {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            DataField::Zero => 0.0,
            DataField::Gaussian {
                center,
                width,
                amplitude,
            } => amplitude * (-((x - center) / width).powi(2)).exp(),
            DataField::Bump {
                center,
                radius,
                amplitude,
            } => {
                let z = (x - center) / radius;
                if z.abs() >= 1.0 {
                    0.0
                } else {
                    amplitude * (-1.0 / (1.0 - z * z)).exp()
                }
            }
            DataField::SineMode { freq, amplitude } => amplitude * (freq * x).sin(),
            DataField::Box { a, b, amplitude } => {
                if x >= *a && x <= *b {
                    *amplitude
                } else {
                    0.0
                }
            }
            DataField::PointMass { .. } => f64::NAN, // no pointwise values
        }
    }

    /// Distributions and jump functions have no smooth pointwise samples and
    /// must be regularized before they reach the stepper.
    pub fn needs_regularization(&self) -> bool {
        matches!(self, DataField::Box { .. } | DataField::PointMass { .. })
    }

    fn as_distribution(&self) -> Option<Distribution> {
        match self {
            DataField::Box { a, b, amplitude } => Some(Distribution::Box {
                a: *a,
                b: *b,
                amplitude: *amplitude,
            }),
            DataField::PointMass { location, weight } => Some(Distribution::PointMass {
                location: *location,
                weight: *weight,
            }),
            _ => None,
        }
    }

    /// `field * kernel_eps` on the 1D axis grid (the data-regularization
    /// scale is `eps` itself).
    pub fn regularize_1d(&self, kernel: &Mollifier, eps: f64, axis: &Grid) -> Result<Vec<C64>> {
        if let DataField::Zero = self {
            return Ok(vec![C64::new(0.0, 0.0); axis.points]);
        }
        if let Some(d) = self.as_distribution() {
            return convolve(&ConvolutionInput::Distribution(&d), kernel, eps, axis);
        }
        let f = |x: f64| self.eval(x);
        convolve(&ConvolutionInput::Function(&f), kernel, eps, axis)
    }

    /// Exact samples for smooth descriptors (None for distributional ones).
    pub fn exact_1d(&self, axis: &Grid) -> Option<Vec<C64>> {
        if self.needs_regularization() {
            return None;
        }
        Some(axis.sample(|x| self.eval(x)))
    }
}

/// Product-form data `f(x_1) * g(x_2)`; `y = None` in one dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataDescriptor {
    pub x: DataField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<DataField>,
}

impl DataDescriptor {
    pub fn one_d(x: DataField) -> Self {
        DataDescriptor { x, y: None }
    }

    pub fn product(x: DataField, y: DataField) -> Self {
        DataDescriptor { x, y: Some(y) }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.x, DataField::Zero)
            || matches!(&self.y, Some(DataField::Zero))
    }

    /// Regularized samples on the full grid at data scale `eps`.
    pub fn regularize(&self, kernel: &Mollifier, eps: f64, grid: &Grid) -> Result<Vec<C64>> {
        let axis = Grid::new_1d(grid.points, grid.extent, grid.boundary);
        let fx = self.x.regularize_1d(kernel, eps, &axis)?;
        match (grid.dim, &self.y) {
            (1, None) => Ok(fx),
            (2, Some(gy)) => {
                let fy = gy.regularize_1d(kernel, eps, &axis)?;
                Ok(tensor2(&fx, &fy))
            }
            (2, None) => {
                // constant along the second axis
                let ones = vec![C64::new(1.0, 0.0); axis.points];
                Ok(tensor2(&fx, &ones))
            }
            _ => Err(Error::Config(
                "2D data descriptor supplied for a 1D grid".into(),
            )),
        }
    }

    /// Exact samples (smooth descriptors only).
    pub fn exact(&self, grid: &Grid) -> Option<Vec<C64>> {
        let axis = Grid::new_1d(grid.points, grid.extent, grid.boundary);
        let fx = self.x.exact_1d(&axis)?;
        match (grid.dim, &self.y) {
            (1, None) => Some(fx),
            (2, Some(gy)) => Some(tensor2(&fx, &gy.exact_1d(&axis)?)),
            (2, None) => {
                let ones = vec![C64::new(1.0, 0.0); axis.points];
                Some(tensor2(&fx, &ones))
            }
            _ => None,
        }
    }
}

fn tensor2(fx: &[C64], fy: &[C64]) -> Vec<C64> {
    let n = fx.len();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(fx[i] * fy[j]);
        }
    }
    out
}

/// Time factor of separable forcing `f(t, x) = s(t) w(x)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TimeProfile {
    Constant { value: f64 },
    Sine { omega: f64 },
    GaussianPulse { center: f64, width: f64 },
}

impl TimeProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeProfile::Constant { value } => *value,
            TimeProfile::Sine { omega } => (omega * t).sin(),
            TimeProfile::GaussianPulse { center, width } => {
                (-((t - center) / width).powi(2)).exp()
            }
        }
    }
}

/// Per-epsilon regularized forcing `f_eps(t, x) = s(t) w_eps(x)`.
#[derive(Debug, Clone)]
pub enum ForcingNet {
    Zero,
    Separable {
        time: TimeProfile,
        /// One spatial profile per ladder rung, on the full grid.
        space: Vec<Vec<C64>>,
    },
}

impl ForcingNet {
    pub fn is_zero(&self) -> bool {
        matches!(self, ForcingNet::Zero)
    }
}

/// Per-epsilon initial data on the full grid.
#[derive(Debug, Clone)]
pub struct DataNet {
    pub per_eps: Vec<Vec<C64>>,
}

impl DataNet {
    pub fn zero(ladder_len: usize, grid: &Grid) -> Self {
        DataNet {
            per_eps: vec![vec![C64::new(0.0, 0.0); grid.len()]; ladder_len],
        }
    }

    pub fn from_descriptor(
        desc: &DataDescriptor,
        kernel: &Mollifier,
        ladder: &[f64],
        grid: &Grid,
    ) -> Result<Self> {
        let per_eps = ladder
            .iter()
            .map(|&eps| desc.regularize(kernel, eps, grid))
            .collect::<Result<Vec<_>>>()?;
        Ok(DataNet { per_eps })
    }

    /// The same exact samples on every rung (smooth data, no mollification).
    pub fn exact(desc: &DataDescriptor, ladder_len: usize, grid: &Grid) -> Result<Self> {
        let v = desc
            .exact(grid)
            .ok_or_else(|| Error::Config("distributional data must be regularized".into()))?;
        Ok(DataNet {
            per_eps: vec![v; ladder_len],
        })
    }
}

// ---------------------------------------------------------------------------
// traces
// ---------------------------------------------------------------------------

/// Time history of one regularized solve.
#[derive(Debug, Clone)]
pub struct SolveTrace {
    pub eps: f64,
    pub omega: f64,
    pub dt: f64,
    pub steps: usize,
    pub checkpoint_stride: usize,
    /// Checkpoint times `t_m` (first 0, last `T`).
    pub times: Vec<f64>,
    /// `u_eps` snapshots at the checkpoint times.
    pub snapshots: Vec<Vec<C64>>,
    /// `d_t u_eps` at the checkpoints, recorded at scheme accuracy during
    /// stepping (`g1` exactly at `t = 0`). May be empty for imported traces,
    /// in which case [`state_vector`] falls back to differencing the
    /// checkpoints themselves.
    pub velocities: Vec<Vec<C64>>,
    /// `||f_eps(t_m)||_{L^2}` at the checkpoints.
    pub forcing_l2: Vec<f64>,
    pub grid: Grid,
    pub kernel_id: String,
    pub scale_id: String,
}

impl SolveTrace {
    pub fn final_snapshot(&self) -> &[C64] {
        self.snapshots.last().expect("at least the initial snapshot")
    }

    pub fn sup_l2(&self) -> f64 {
        self.snapshots
            .iter()
            .map(|s| self.grid.l2_norm(s))
            .fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// the solver
// ---------------------------------------------------------------------------

/// Stable time step `theta * h / sqrt(sup sum_i a_i)` with the `theta * h`
/// fallback for identically degenerate coefficients.
pub fn stable_dt(grid: &Grid, nets: &[&RegularizedNet]) -> f64 {
    let amax: f64 = nets.iter().map(|n| n.max_sup()).sum();
    if amax > 0.0 {
        grid.cfl * grid.spacing() / amax.sqrt()
    } else {
        grid.cfl * grid.spacing()
    }
}

/// Solve the regularized Cauchy problem for every rung of the ladder.
///
/// `nets` holds one coefficient net per space axis (`nets.len() == grid.dim`)
/// sharing one ladder; data nets are aligned with the same ladder. Solves
/// run concurrently across rungs; one `dt` (the ladder-wide CFL bound)
/// serves the whole sweep.
pub fn solve(
    nets: &[&RegularizedNet],
    forcing: &ForcingNet,
    g0: &DataNet,
    g1: &DataNet,
    grid: &Grid,
) -> Result<Vec<SolveTrace>> {
    let amax: f64 = nets.iter().map(|n| n.max_sup()).sum();
    solve_with_speed_bound(nets, forcing, g0, g1, grid, amax)
}

/// [`solve`] with an explicit bound on `sup sum_i a_i`, so that paired
/// sweeps (two kernels, one comparison) share one `dt` and hence exactly
/// comparable checkpoint times.
pub fn solve_with_speed_bound(
    nets: &[&RegularizedNet],
    forcing: &ForcingNet,
    g0: &DataNet,
    g1: &DataNet,
    grid: &Grid,
    amax: f64,
) -> Result<Vec<SolveTrace>> {
    grid.validate()?;
    if nets.len() != grid.dim {
        return Err(Error::Config(format!(
            "{} coefficient nets for a {}D grid",
            nets.len(),
            grid.dim
        )));
    }
    let ladder = nets[0].ladder.clone();
    for net in nets {
        if net.ladder != ladder {
            return Err(Error::Config("coefficient nets disagree on the ladder".into()));
        }
        if !net.grid.same_layout(&Grid::new_1d(grid.points, grid.extent, grid.boundary)) {
            return Err(Error::Config("coefficient net grid does not match".into()));
        }
        if net.min_value() < -1e-12 {
            return Err(Error::Config("negative coefficient values in net".into()));
        }
    }
    if g0.per_eps.len() != ladder.len() || g1.per_eps.len() != ladder.len() {
        return Err(Error::Config("data nets do not match the ladder".into()));
    }
    if let ForcingNet::Separable { space, .. } = forcing {
        if space.len() != ladder.len() {
            return Err(Error::Config("forcing net does not match the ladder".into()));
        }
    }

    let own_amax: f64 = nets.iter().map(|n| n.max_sup()).sum();
    if amax < own_amax - 1e-12 {
        return Err(Error::Config(format!(
            "speed bound {amax:.6} is below the nets' own sup {own_amax:.6}"
        )));
    }
    let dt = if amax > 0.0 {
        grid.cfl * grid.spacing() / amax.sqrt()
    } else {
        grid.cfl * grid.spacing()
    };
    let limit = if own_amax > 0.0 {
        grid.spacing() / own_amax.sqrt()
    } else {
        f64::INFINITY
    };
    if dt > limit {
        return Err(Error::Cfl { dt, limit });
    }

    let stride = grid.checkpoint_stride;
    let mut steps = (grid.horizon / dt).ceil() as usize;
    steps = steps.div_ceil(stride) * stride;
    let dt = grid.horizon / steps as f64;

    let indices: Vec<usize> = (0..ladder.len()).collect();
    indices
        .into_par_iter()
        .map(|i| {
            let coeffs: Vec<Vec<f64>> = (0..grid.dim)
                .map(|ax| nets[ax].entries[i].expand(grid))
                .collect();
            let rung = RungInput {
                coeffs: &coeffs,
                forcing_space: match forcing {
                    ForcingNet::Zero => None,
                    ForcingNet::Separable { space, .. } => Some(&space[i]),
                },
                forcing_time: match forcing {
                    ForcingNet::Zero => None,
                    ForcingNet::Separable { time, .. } => Some(time),
                },
                g0: &g0.per_eps[i],
                g1: &g1.per_eps[i],
                eps: ladder[i],
                omega: nets[0].entries[i].omega,
            };
            step_one(&rung, grid, dt, steps, stride, &nets[0].kernel.id, &nets[0].scale.id())
        })
        .collect()
}

struct RungInput<'a> {
    coeffs: &'a [Vec<f64>],
    forcing_space: Option<&'a Vec<C64>>,
    forcing_time: Option<&'a TimeProfile>,
    g0: &'a [C64],
    g1: &'a [C64],
    eps: f64,
    omega: f64,
}

fn step_one(
    rung: &RungInput<'_>,
    grid: &Grid,
    dt: f64,
    steps: usize,
    stride: usize,
    kernel_id: &str,
    scale_id: &str,
) -> Result<SolveTrace> {
    let len = grid.len();
    if rung.g0.len() != len || rung.g1.len() != len {
        return Err(Error::Config("data length does not match the grid".into()));
    }
    let h2 = grid.spacing() * grid.spacing();
    let coeffs = rung.coeffs;
    let apply_op = |u: &[C64], out: &mut [C64]| {
        match grid.dim {
            1 => {
                let n = grid.points;
                for i in 0..n {
                    let (l, r) = neighbor_1d(u, i, n, grid.boundary);
                    out[i] = coeffs[0][i] * ((l - 2.0 * u[i] + r) / h2);
                }
            }
            2 => {
                let n = grid.points;
                for i in 0..n {
                    for j in 0..n {
                        let c = i * n + j;
                        let (u_im, u_ip) = neighbor_axis0(u, i, j, n, grid.boundary);
                        let (u_jm, u_jp) = neighbor_axis1(u, i, j, n, grid.boundary);
                        let d0 = (u_im - 2.0 * u[c] + u_ip) / h2;
                        let d1 = (u_jm - 2.0 * u[c] + u_jp) / h2;
                        out[c] = coeffs[0][c] * d0 + coeffs[1][c] * d1;
                    }
                }
            }
            _ => unreachable!(),
        }
    };
    let forcing_l2_at = |t: f64| -> f64 {
        match (rung.forcing_space, rung.forcing_time) {
            (Some(w), Some(s)) => grid.l2_norm(w) * s.eval(t).abs(),
            _ => 0.0,
        }
    };
    let forcing_scale_at = |t: f64| -> Option<f64> {
        rung.forcing_time.map(|s| s.eval(t))
    };

    let mut lap = vec![C64::new(0.0, 0.0); len];
    let mut prev: Vec<C64> = rung.g0.to_vec();
    apply_op(&prev, &mut lap);

    let mut trace = SolveTrace {
        eps: rung.eps,
        omega: rung.omega,
        dt,
        steps,
        checkpoint_stride: stride,
        times: vec![0.0],
        snapshots: vec![prev.clone()],
        velocities: vec![rung.g1.to_vec()],
        forcing_l2: vec![forcing_l2_at(0.0)],
        grid: grid.clone(),
        kernel_id: kernel_id.to_string(),
        scale_id: scale_id.to_string(),
    };

    // Taylor-seeded first step
    let mut curr: Vec<C64> = vec![C64::new(0.0, 0.0); len];
    let s0 = forcing_scale_at(0.0);
    for i in 0..len {
        let fi = match (rung.forcing_space, s0) {
            (Some(w), Some(s)) => w[i] * s,
            _ => C64::new(0.0, 0.0),
        };
        curr[i] = prev[i] + dt * rung.g1[i] + 0.5 * dt * dt * (lap[i] + fi);
    }

    for m in 1..steps {
        apply_op(&curr, &mut lap);
        let sm = forcing_scale_at(m as f64 * dt);
        for i in 0..len {
            let fi = match (rung.forcing_space, sm) {
                (Some(w), Some(s)) => w[i] * s,
                _ => C64::new(0.0, 0.0),
            };
            let next = 2.0 * curr[i] - prev[i] + dt * dt * (lap[i] + fi);
            prev[i] = curr[i];
            curr[i] = next;
        }
        if (m + 1) % stride == 0 {
            let t = (m + 1) as f64 * dt;
            if curr
                .iter()
                .step_by((len / 64).max(1))
                .any(|v| !v.re.is_finite() || !v.im.is_finite())
            {
                return Err(Error::Divergence { step: m + 1 });
            }
            // d_t u(t) = (u^{m+1} - u^m)/dt + (dt/2) u_tt(t) + O(dt^2)
            apply_op(&curr, &mut lap);
            let st = forcing_scale_at(t);
            let vel: Vec<C64> = (0..len)
                .map(|i| {
                    let fi = match (rung.forcing_space, st) {
                        (Some(w), Some(s)) => w[i] * s,
                        _ => C64::new(0.0, 0.0),
                    };
                    (curr[i] - prev[i]) / dt + 0.5 * dt * (lap[i] + fi)
                })
                .collect();
            trace.snapshots.push(curr.clone());
            trace.velocities.push(vel);
            trace.times.push(t);
            trace.forcing_l2.push(forcing_l2_at(t));
        }
    }
    Ok(trace)
}

#[inline]
fn neighbor_1d(u: &[C64], i: usize, n: usize, b: BoundaryMode) -> (C64, C64) {
    let z = C64::new(0.0, 0.0);
    match b {
        BoundaryMode::Periodic => (u[(i + n - 1) % n], u[(i + 1) % n]),
        BoundaryMode::ZeroPadded => (
            if i == 0 { z } else { u[i - 1] },
            if i + 1 == n { z } else { u[i + 1] },
        ),
    }
}

#[inline]
fn neighbor_axis0(u: &[C64], i: usize, j: usize, n: usize, b: BoundaryMode) -> (C64, C64) {
    let z = C64::new(0.0, 0.0);
    match b {
        BoundaryMode::Periodic => (u[((i + n - 1) % n) * n + j], u[((i + 1) % n) * n + j]),
        BoundaryMode::ZeroPadded => (
            if i == 0 { z } else { u[(i - 1) * n + j] },
            if i + 1 == n { z } else { u[(i + 1) * n + j] },
        ),
    }
}

#[inline]
fn neighbor_axis1(u: &[C64], i: usize, j: usize, n: usize, b: BoundaryMode) -> (C64, C64) {
    let z = C64::new(0.0, 0.0);
    match b {
        BoundaryMode::Periodic => (u[i * n + (j + n - 1) % n], u[i * n + (j + 1) % n]),
        BoundaryMode::ZeroPadded => (
            if j == 0 { z } else { u[i * n + j - 1] },
            if j + 1 == n { z } else { u[i * n + j + 1] },
        ),
    }
}

// ---------------------------------------------------------------------------
// oracles and state reconstruction
// ---------------------------------------------------------------------------

/// Closed-form d'Alembert solution for constant wave speed squared `c >= 0`:
/// `u = (g0(x - sqrt(c) t) + g0(x + sqrt(c) t))/2
///      + 1/(2 sqrt(c)) * int_{x - sqrt(c) t}^{x + sqrt(c) t} g1`,
/// degenerating to `g0(x) + t g1(x)` at `c = 0`. The `g1` integral is done
/// by composite Simpson quadrature.
pub fn dalembert_oracle(
    c: f64,
    g0: &dyn Fn(f64) -> f64,
    g1: &dyn Fn(f64) -> f64,
    t: f64,
    x: f64,
) -> f64 {
    assert!(c >= 0.0, "wave speed squared must be non-negative");
    if c == 0.0 {
        return g0(x) + t * g1(x);
    }
    let s = c.sqrt();
    let travel = 0.5 * (g0(x - s * t) + g0(x + s * t));
    let integral = simpson(g1, x - s * t, x + s * t, 256);
    travel + integral / (2.0 * s)
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let n = panels * 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Reconstruct the first-order state `U = (d_{x_1}u, ..., d_{x_n}u, d_t u)`
/// at every checkpoint. Spatial gradients are spectral; the time derivative
/// uses the recorded velocities when the trace carries them, otherwise
/// centred differences of the checkpoints (3-point one-sided at the ends),
/// which requires a stride fine enough for the sought accuracy.
pub fn state_vector(trace: &SolveTrace) -> Result<Vec<StateVector>> {
    let m = trace.snapshots.len();
    let recorded = trace.velocities.len() == m;
    if m < 3 && !recorded {
        return Err(Error::Resolution(format!(
            "{m} checkpoints are too few for time differentiation (need >= 3)"
        )));
    }
    let dt_cp = if m > 1 {
        trace.times[1] - trace.times[0]
    } else {
        trace.dt
    };
    let n = trace.grid.dim;
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let u = &trace.snapshots[k];
        let mut components = Vec::with_capacity(n + 1);
        for ax in 0..n {
            components.push(spectral_derivative(u, &trace.grid, ax, 1));
        }
        let ut: Vec<C64> = if recorded {
            trace.velocities[k].clone()
        } else if k == 0 {
            let (a, b, c) = (&trace.snapshots[0], &trace.snapshots[1], &trace.snapshots[2]);
            (0..u.len())
                .map(|i| (-3.0 * a[i] + 4.0 * b[i] - c[i]) / (2.0 * dt_cp))
                .collect()
        } else if k + 1 == m {
            let (a, b, c) = (
                &trace.snapshots[m - 3],
                &trace.snapshots[m - 2],
                &trace.snapshots[m - 1],
            );
            (0..u.len())
                .map(|i| (a[i] - 4.0 * b[i] + 3.0 * c[i]) / (2.0 * dt_cp))
                .collect()
        } else {
            let (a, b) = (&trace.snapshots[k - 1], &trace.snapshots[k + 1]);
            (0..u.len()).map(|i| (b[i] - a[i]) / (2.0 * dt_cp)).collect()
        };
        components.push(ut);
        out.push(StateVector {
            level: 0,
            n,
            components,
            grid: trace.grid.clone(),
        });
    }
    Ok(out)
}
