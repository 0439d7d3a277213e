//! Quantitative verdicts on solution nets: energies and their Groenwall
//! envelopes, Sobolev-norm ladders, moderateness and negligibility fits,
//! consistency with classical solutions, and mollifier sensitivity.

use serde::{Deserialize, Serialize};

use crate::coefficients::{glaeser_check, CoefficientField, RegularizedNet, GLAESER_FLOOR};
use crate::error::{Error, Result};
use crate::fit::{fit_vs_inverse_eps, SlopeFit};
use crate::fourier::{sobolev_norms as fourier_sobolev, spectral_derivative};
use crate::grid::Grid;
use crate::mollifier::Mollifier;
use crate::solver::{
    dalembert_oracle, solve, solve_with_speed_bound, DataDescriptor, DataNet,
    ForcingNet, SolveTrace,
};
use crate::system::StateVector;
use crate::C64;

// ---------------------------------------------------------------------------
// energy and Groenwall
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub eps: f64,
    pub times: Vec<f64>,
    /// `E(t_m) = sum_i (a_i U_i, U_i) + ||U_{n+1}||^2` by grid quadrature.
    pub energy: Vec<f64>,
    /// `||U_{n+1}(t_m)||^2` (bounded by `E` from below).
    pub last_sq: Vec<f64>,
    /// `(E(0) + int_0^t ||f||^2) e^{c t}`.
    pub bound: Vec<f64>,
    /// `c = max(2 M_eps, n + 1)`.
    pub c: f64,
    pub m_eps: f64,
}

/// Energy of a state trajectory against the coefficient nets of rung
/// `eps_idx`. `forcing_l2` are the checkpoint forcing norms from the trace.
pub fn energy(
    states: &[StateVector],
    nets: &[&RegularizedNet],
    eps_idx: usize,
    times: &[f64],
    forcing_l2: &[f64],
) -> Result<EnergyTrace> {
    if states.is_empty() {
        return Err(Error::Config("empty state trajectory".into()));
    }
    let grid = &states[0].grid;
    let n = states[0].n;
    if nets.len() != n {
        return Err(Error::Config(format!(
            "{} nets for {n} axes",
            nets.len()
        )));
    }
    let coeff: Vec<Vec<f64>> = nets.iter().map(|nt| nt.entries[eps_idx].expand(grid)).collect();
    let cell = grid.cell();

    let mut energy_v = Vec::with_capacity(states.len());
    let mut last_sq = Vec::with_capacity(states.len());
    for st in states {
        let mut e = 0.0;
        for (i, a) in coeff.iter().enumerate() {
            let ui = st.component(i);
            e += ui
                .iter()
                .zip(a)
                .map(|(v, &av)| av * v.norm_sqr())
                .sum::<f64>()
                * cell;
        }
        let un1 = st.component(n);
        let l2sq = un1.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell;
        e += l2sq;
        if e < l2sq - 1e-12 * l2sq.max(1.0) {
            return Err(Error::Config(
                "energy lower bound ||U_{n+1}||^2 <= E violated (negative coefficients?)".into(),
            ));
        }
        energy_v.push(e);
        last_sq.push(l2sq);
    }

    // M_eps: max over axes of the layered second-derivative sup norm
    let m_eps = nets
        .iter()
        .map(|nt| nt.entries[eps_idx].supnorms[2])
        .fold(0.0, f64::max);
    let c = (2.0 * m_eps).max((n + 1) as f64);

    // bound curve with trapezoid-cumulative forcing integral
    let mut cum = 0.0;
    let mut bound = Vec::with_capacity(states.len());
    for (m, &t) in times.iter().enumerate() {
        if m > 0 {
            let dt = times[m] - times[m - 1];
            cum += 0.5 * dt * (forcing_l2[m].powi(2) + forcing_l2[m - 1].powi(2));
        }
        bound.push((energy_v[0] + cum) * (c * t).exp());
    }

    Ok(EnergyTrace {
        eps: nets[0].ladder[eps_idx],
        times: times.to_vec(),
        energy: energy_v,
        last_sq,
        bound,
        c,
        m_eps,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GronwallVerdict {
    pub pass: bool,
    /// Worst `E(t)/bound(t)` over the checkpoints.
    pub worst_ratio: f64,
    pub worst_t: f64,
    /// Max of the discrete differential margin
    /// `(dE/dt - cE - ||f||^2)/max(E, 1)`.
    pub diff_margin: f64,
    pub tol: f64,
}

/// Verify `E(t) <= (E(0) + int ||f||^2) e^{ct}` within relative slack `tol`
/// (default 5%); requires at least 32 checkpoints so the discrete
/// derivative in the diagnostic margin is meaningful.
pub fn gronwall_check(et: &EnergyTrace, tol: f64) -> Result<GronwallVerdict> {
    if et.times.len() < 32 {
        return Err(Error::Resolution(format!(
            "{} checkpoints < 32; refine the stride",
            et.times.len()
        )));
    }
    let mut worst = (0.0f64, 0.0f64);
    for ((&e, &b), &t) in et.energy.iter().zip(&et.bound).zip(&et.times) {
        let r = if b > 0.0 { e / b } else { f64::INFINITY };
        if r > worst.0 {
            worst = (r, t);
        }
    }
    // discrete differential form: centered interior, one-sided ends
    let m = et.times.len();
    let mut diff_margin = f64::NEG_INFINITY;
    for k in 0..m {
        let de = if k == 0 {
            (et.energy[1] - et.energy[0]) / (et.times[1] - et.times[0])
        } else if k + 1 == m {
            (et.energy[m - 1] - et.energy[m - 2]) / (et.times[m - 1] - et.times[m - 2])
        } else {
            (et.energy[k + 1] - et.energy[k - 1]) / (et.times[k + 1] - et.times[k - 1])
        };
        let margin = (de - et.c * et.energy[k] - et.bound[k].min(1e308) * 0.0) / et.energy[k].max(1.0);
        diff_margin = diff_margin.max(margin);
    }
    Ok(GronwallVerdict {
        pass: worst.0 <= 1.0 + tol,
        worst_ratio: worst.0,
        worst_t: worst.1,
        diff_margin,
        tol,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegralGronwallVerdict {
    pub pass: bool,
    pub worst_ratio: f64,
    pub worst_t: f64,
    pub tol: f64,
}

/// Verify the conclusion of the Groenwall lemma with integral term:
/// if `phi' <= C1 phi + C2 int_0^t phi + psi` then `phi` stays below the
/// comparison solution of `y' = C1 y + C2 z + psi, z' = y, y(0) = phi(0)`,
/// which is integrated here with RK4 substeps (the lemma's constant is not
/// explicit; the comparison solution is the sharp envelope).
pub fn gronwall_integral_check(
    phi: &[f64],
    psi: &[f64],
    times: &[f64],
    c1: f64,
    c2: f64,
    tol: f64,
) -> Result<IntegralGronwallVerdict> {
    if phi.len() != times.len() || psi.len() != times.len() {
        return Err(Error::Config("trace lengths mismatch".into()));
    }
    if times.len() < 8 {
        return Err(Error::Resolution("too few checkpoints".into()));
    }
    let psi_at = |t: f64| -> f64 {
        // linear interpolation on the checkpoint grid
        let m = times.len();
        if t <= times[0] {
            return psi[0];
        }
        if t >= times[m - 1] {
            return psi[m - 1];
        }
        let k = times.partition_point(|&s| s <= t).min(m - 1);
        let (t0, t1) = (times[k - 1], times[k]);
        let f = (t - t0) / (t1 - t0);
        psi[k - 1] * (1.0 - f) + psi[k] * f
    };

    let substeps = 32usize;
    let mut y = phi[0];
    let mut z = 0.0f64;
    let mut worst = (phi[0] / phi[0].max(1e-300), times[0]);
    for k in 1..times.len() {
        let h = (times[k] - times[k - 1]) / substeps as f64;
        let mut t = times[k - 1];
        for _ in 0..substeps {
            let f = |t: f64, y: f64, z: f64| (c1 * y + c2 * z + psi_at(t), y);
            let (k1y, k1z) = f(t, y, z);
            let (k2y, k2z) = f(t + 0.5 * h, y + 0.5 * h * k1y, z + 0.5 * h * k1z);
            let (k3y, k3z) = f(t + 0.5 * h, y + 0.5 * h * k2y, z + 0.5 * h * k2z);
            let (k4y, k4z) = f(t + h, y + h * k3y, z + h * k3z);
            y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
            t += h;
        }
        let r = phi[k] / y.max(1e-300);
        if r > worst.0 {
            worst = (r, times[k]);
        }
    }
    Ok(IntegralGronwallVerdict {
        pass: worst.0 <= 1.0 + tol,
        worst_ratio: worst.0,
        worst_t: worst.1,
        tol,
    })
}

// ---------------------------------------------------------------------------
// Sobolev norms of traces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SobolevTable {
    pub eps: f64,
    pub times: Vec<f64>,
    /// `norms[m][k] = ||u(t_m)||_{H^k}` for `k = 0..=k_max`.
    pub norms: Vec<Vec<f64>>,
    /// Top-octave share of the highest-order norm exceeded 0.5 somewhere.
    pub aliasing_warning: bool,
}

impl SobolevTable {
    pub fn sup_over_t(&self, k: usize) -> f64 {
        self.norms.iter().map(|row| row[k]).fold(0.0, f64::max)
    }
}

/// Per-checkpoint Sobolev norms `||u_eps(t)||_{H^k}` via Fourier
/// multipliers.
pub fn sobolev_norms(trace: &SolveTrace, k_max: usize) -> Result<SobolevTable> {
    let mut norms = Vec::with_capacity(trace.snapshots.len());
    let mut warn = false;
    for snap in &trace.snapshots {
        let (row, frac) = fourier_sobolev(snap, &trace.grid, k_max)?;
        warn |= frac > 0.5;
        norms.push(row);
    }
    Ok(SobolevTable {
        eps: trace.eps,
        times: trace.times.clone(),
        norms,
        aliasing_warning: warn,
    })
}

// ---------------------------------------------------------------------------
// moderateness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModerateVerdict {
    Moderate,
    NegligibleTrend,
    ExceedsCap,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeratenessFit {
    pub ladder: Vec<f64>,
    pub norms: Vec<f64>,
    pub norm_kind: String,
    pub fit: SlopeFit,
    pub verdict: ModerateVerdict,
    pub cap: f64,
    /// Requested negligibility order `q`.
    pub q: f64,
}

/// Fit `log ||u_eps||` against `log(1/eps)`: slope `N` means growth like
/// `eps^{-N}`. Verdict `Moderate` if the slope stays at or below `cap`,
/// `NegligibleTrend` if it is at most `-q`.
pub fn moderateness_fit(
    ladder: &[f64],
    norms: &[f64],
    norm_kind: &str,
    cap: f64,
    q: f64,
) -> Result<ModeratenessFit> {
    for (e, v) in ladder.iter().zip(norms) {
        if !v.is_finite() {
            return Err(Error::Fit(format!("non-finite norm at eps = {e}")));
        }
    }
    let fit = fit_vs_inverse_eps(ladder, norms)?;
    let verdict = if fit.identically_zero || fit.slope <= -q {
        ModerateVerdict::NegligibleTrend
    } else if fit.slope <= cap {
        ModerateVerdict::Moderate
    } else {
        ModerateVerdict::ExceedsCap
    };
    Ok(ModeratenessFit {
        ladder: ladder.to_vec(),
        norms: norms.to_vec(),
        norm_kind: norm_kind.to_string(),
        fit,
        verdict,
        cap,
        q,
    })
}

// ---------------------------------------------------------------------------
// consistency with the classical solution
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    /// Constant coefficients: d'Alembert closed form.
    DAlembert,
    /// No closed-form oracle: comparison against the finest-rung solve.
    SelfFinest,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub ladder: Vec<f64>,
    pub reference: ReferenceKind,
    /// `sup_t ||u_eps(t) - u_ref(t)||_{H^k}` per rung, `k = 0..=k_max`.
    pub sup_errors: Vec<Vec<f64>>,
    /// Pre-solve data error `||g0_eps - g0||_{H^2}` per rung.
    pub data_errors: Vec<f64>,
    pub data_error_fit: Option<SlopeFit>,
    /// Fitted decay order of the `L^2` solution error (rungs above floor).
    pub solution_error_fit: Option<SlopeFit>,
    /// Scheme error floor: the same solve with exact (unmollified) data.
    pub scheme_floor: f64,
    /// `L^2` errors decrease monotonically until within `2 x` floor.
    pub monotone_to_floor: bool,
}

pub struct ConsistencyInputs<'a> {
    pub field: &'a CoefficientField,
    pub coeff_kernel: &'a Mollifier,
    pub data_kernel: &'a Mollifier,
    pub scale: &'a crate::mollifier::PositiveScale,
    pub ladder: &'a [f64],
    pub grid: &'a Grid,
    pub g0: &'a DataDescriptor,
    pub g1: &'a DataDescriptor,
    pub k_max: usize,
}

/// Solve the regularized problems for a smooth (here: constant) coefficient
/// field and measure convergence to the classical solution as the data
/// mollification sharpens.
pub fn consistency_test(inp: &ConsistencyInputs<'_>) -> Result<ConsistencyReport> {
    let c = match inp.field {
        CoefficientField::Constant { value } => Some(*value),
        _ => None,
    };
    if inp.grid.dim != 1 {
        return Err(Error::Config("consistency test is 1D".into()));
    }
    let net = crate::coefficients::regularize(
        inp.field,
        inp.coeff_kernel,
        inp.scale,
        inp.ladder,
        inp.grid,
    )?;
    let g0 = DataNet::from_descriptor(inp.g0, inp.data_kernel, inp.ladder, inp.grid)?;
    let g1 = DataNet::from_descriptor(inp.g1, inp.data_kernel, inp.ladder, inp.grid)?;
    let traces = solve(&[&net], &ForcingNet::Zero, &g0, &g1, inp.grid)?;

    // reference per checkpoint
    let (reference, ref_snaps) = match c {
        Some(cval) => {
            let g0f = inp.g0.clone();
            let g1f = inp.g1.clone();
            let g0c = move |x: f64| g0f.x.eval(x);
            let g1c = move |x: f64| g1f.x.eval(x);
            let snaps: Vec<Vec<C64>> = traces[0]
                .times
                .iter()
                .map(|&t| {
                    (0..inp.grid.points)
                        .map(|i| {
                            C64::new(
                                dalembert_oracle(cval, &g0c, &g1c, t, inp.grid.coord(i)),
                                0.0,
                            )
                        })
                        .collect()
                })
                .collect();
            (ReferenceKind::DAlembert, snaps)
        }
        None => (
            ReferenceKind::SelfFinest,
            traces.last().expect("nonempty ladder").snapshots.clone(),
        ),
    };

    // scheme floor: exact data, same solver settings
    let scheme_floor = match (c, inp.g0.exact(inp.grid), inp.g1.exact(inp.grid)) {
        (Some(_), Some(e0), Some(e1)) => {
            let ladder1 = [inp.ladder[0]];
            let net1 = crate::coefficients::regularize(
                inp.field,
                inp.coeff_kernel,
                inp.scale,
                &ladder1,
                inp.grid,
            )?;
            let tr = solve_with_speed_bound(
                &[&net1],
                &ForcingNet::Zero,
                &DataNet { per_eps: vec![e0] },
                &DataNet { per_eps: vec![e1] },
                inp.grid,
                net.max_sup(),
            )?;
            sup_l2_error(&tr[0], &ref_snaps, inp.grid)
        }
        _ => 0.0,
    };

    let mut sup_errors = Vec::with_capacity(inp.ladder.len());
    for tr in &traces {
        let mut per_k = vec![0.0f64; inp.k_max + 1];
        for (snap, rf) in tr.snapshots.iter().zip(&ref_snaps) {
            let diff: Vec<C64> = snap.iter().zip(rf).map(|(a, b)| a - b).collect();
            let (norms, _) = fourier_sobolev(&diff, inp.grid, inp.k_max)?;
            for (k, v) in norms.iter().enumerate() {
                per_k[k] = per_k[k].max(*v);
            }
        }
        sup_errors.push(per_k);
    }

    // pre-solve data error in H^2
    let mut data_errors = Vec::with_capacity(inp.ladder.len());
    let exact_g0 = inp.g0.exact(inp.grid);
    for (i, _) in inp.ladder.iter().enumerate() {
        match &exact_g0 {
            Some(e0) => {
                let diff: Vec<C64> = g0.per_eps[i].iter().zip(e0).map(|(a, b)| a - b).collect();
                let (norms, _) = fourier_sobolev(&diff, inp.grid, 2)?;
                data_errors.push(norms[2]);
            }
            None => data_errors.push(f64::NAN),
        }
    }

    // fits over rungs above numerical floor
    let data_error_fit = fit_above_floor(inp.ladder, &data_errors, 1e-12);
    let l2_errors: Vec<f64> = sup_errors.iter().map(|row| row[0]).collect();
    let solution_error_fit = fit_above_floor(inp.ladder, &l2_errors, scheme_floor.max(1e-14));

    // monotone decrease until within 2x of the scheme floor
    let mut monotone = true;
    for w in l2_errors.windows(2) {
        let at_floor = w[0] <= 2.0 * scheme_floor.max(1e-14);
        if !at_floor && w[1] > w[0] * 1.05 {
            monotone = false;
        }
    }

    Ok(ConsistencyReport {
        ladder: inp.ladder.to_vec(),
        reference,
        sup_errors,
        data_errors,
        data_error_fit,
        solution_error_fit,
        scheme_floor,
        monotone_to_floor: monotone,
    })
}

fn sup_l2_error(tr: &SolveTrace, ref_snaps: &[Vec<C64>], grid: &Grid) -> f64 {
    tr.snapshots
        .iter()
        .zip(ref_snaps)
        .map(|(a, b)| {
            let diff: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            grid.l2_norm(&diff)
        })
        .fold(0.0, f64::max)
}

/// OLS decay fit restricted to the rungs whose values sit above `floor`;
/// `None` when fewer than 4 rungs qualify. Decay order is `-slope`.
fn fit_above_floor(ladder: &[f64], values: &[f64], floor: f64) -> Option<SlopeFit> {
    let pairs: (Vec<f64>, Vec<f64>) = ladder
        .iter()
        .zip(values)
        .filter(|(_, &v)| v.is_finite() && v > floor)
        .map(|(&e, &v)| (e, v))
        .unzip();
    if pairs.0.len() < 4 {
        return None;
    }
    fit_vs_inverse_eps(&pairs.0, &pairs.1).ok()
}

// ---------------------------------------------------------------------------
// mollifier sensitivity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub kernel_ids: (String, String),
    pub ladder: Vec<f64>,
    pub omegas: Vec<f64>,
    /// `sup_t ||u_eps - u~_eps||_{L^2}` per rung.
    pub sup_diff: Vec<f64>,
    /// Per-rung, per-checkpoint difference norms.
    pub diff_table: Vec<Vec<f64>>,
    /// Measured `lambda(eps) = int_0^T ||dxx u~_eps||_{L^2}^2 dt`.
    pub lambda: Vec<f64>,
    /// Envelope `omega^2(eps) * lambda(eps)` compared against `sup_diff^2`.
    pub envelope: Vec<f64>,
    /// Fitted slope of `sup_diff` vs `log(1/eps)` (negative = converging).
    pub diff_fit: Option<SlopeFit>,
    /// Fitted constant `C = max sup_diff^2 / envelope`.
    pub fitted_constant: f64,
    /// Slope of `log(sup_diff^2/envelope)`; <= slack means the envelope
    /// dominates the decay up to a constant.
    pub ratio_slope: Option<f64>,
    pub converging: bool,
    /// Moderateness slopes of `sup_t ||u||_{L^2}` for the two solution nets.
    pub moderateness_slopes: (f64, f64),
    /// Glaeser exponents of the two coefficient nets (None for exact nets).
    pub glaeser_exponents: (Option<f64>, Option<f64>),
}

pub struct SensitivityInputs<'a> {
    pub field: &'a CoefficientField,
    pub kernel_a: &'a Mollifier,
    pub kernel_b: &'a Mollifier,
    pub data_kernel: &'a Mollifier,
    pub scale: &'a crate::mollifier::PositiveScale,
    pub ladder: &'a [f64],
    pub grid: &'a Grid,
    pub g0: &'a DataDescriptor,
    pub g1: &'a DataDescriptor,
}

/// Solve the same regularized problem with two coefficient mollifiers and
/// quantify the difference of the solution nets.
pub fn mollifier_sensitivity(inp: &SensitivityInputs<'_>) -> Result<SensitivityReport> {
    if inp.field.is_distributional()
        && !(inp.kernel_a.is_positive() && inp.kernel_b.is_positive())
    {
        return Err(Error::Config(
            "distributional fields require positive bump kernels on both sides".into(),
        ));
    }
    let net_a =
        crate::coefficients::regularize(inp.field, inp.kernel_a, inp.scale, inp.ladder, inp.grid)?;
    let net_b =
        crate::coefficients::regularize(inp.field, inp.kernel_b, inp.scale, inp.ladder, inp.grid)?;
    let g0 = DataNet::from_descriptor(inp.g0, inp.data_kernel, inp.ladder, inp.grid)?;
    let g1 = DataNet::from_descriptor(inp.g1, inp.data_kernel, inp.ladder, inp.grid)?;

    let amax = net_a.max_sup().max(net_b.max_sup());
    let tr_a = solve_with_speed_bound(&[&net_a], &ForcingNet::Zero, &g0, &g1, inp.grid, amax)?;
    let tr_b = solve_with_speed_bound(&[&net_b], &ForcingNet::Zero, &g0, &g1, inp.grid, amax)?;

    let mut sup_diff = Vec::new();
    let mut diff_table = Vec::new();
    let mut lambda = Vec::new();
    let mut envelope = Vec::new();
    for (a, b) in tr_a.iter().zip(&tr_b) {
        let mut per_t = Vec::with_capacity(a.snapshots.len());
        for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
            let diff: Vec<C64> = sa.iter().zip(sb).map(|(x, y)| x - y).collect();
            per_t.push(inp.grid.l2_norm(&diff));
        }
        sup_diff.push(per_t.iter().fold(0.0f64, |m, &v| m.max(v)));

        // lambda(eps) = int ||dxx u~||^2 dt by checkpoint trapezoid
        let mut lam = 0.0;
        let mut prev: Option<f64> = None;
        for (m, snap) in b.snapshots.iter().enumerate() {
            let dxx = spectral_derivative(snap, inp.grid, 0, 2);
            let v = inp.grid.l2_norm(&dxx).powi(2);
            if let Some(pv) = prev {
                lam += 0.5 * (b.times[m] - b.times[m - 1]) * (v + pv);
            }
            prev = Some(v);
        }
        lambda.push(lam);
        envelope.push(a.omega * a.omega * lam);
        diff_table.push(per_t);
    }

    let diff_fit = fit_vs_inverse_eps(inp.ladder, &sup_diff).ok();
    let converging = diff_fit
        .as_ref()
        .map(|f| f.identically_zero || f.slope < 0.0)
        .unwrap_or(false);

    let mut fitted_constant = 0.0f64;
    let mut ratios = Vec::new();
    for (&d, &env) in sup_diff.iter().zip(&envelope) {
        if env > 0.0 {
            let r = d * d / env;
            fitted_constant = fitted_constant.max(r);
            ratios.push(r);
        }
    }
    let ratio_slope = if ratios.len() == inp.ladder.len() {
        fit_vs_inverse_eps(inp.ladder, &ratios).ok().map(|f| f.slope)
    } else {
        None
    };

    let sup_a: Vec<f64> = tr_a.iter().map(|t| t.sup_l2()).collect();
    let sup_b: Vec<f64> = tr_b.iter().map(|t| t.sup_l2()).collect();
    let slope_a = fit_vs_inverse_eps(inp.ladder, &sup_a).map(|f| f.slope).unwrap_or(f64::NAN);
    let slope_b = fit_vs_inverse_eps(inp.ladder, &sup_b).map(|f| f.slope).unwrap_or(f64::NAN);

    let gl_a = glaeser_check(&net_a, GLAESER_FLOOR, 1e-6)?;
    let gl_b = glaeser_check(&net_b, GLAESER_FLOOR, 1e-6)?;

    Ok(SensitivityReport {
        kernel_ids: (inp.kernel_a.id.clone(), inp.kernel_b.id.clone()),
        ladder: inp.ladder.to_vec(),
        omegas: tr_a.iter().map(|t| t.omega).collect(),
        sup_diff,
        diff_table,
        lambda,
        envelope,
        diff_fit,
        fitted_constant,
        ratio_slope,
        converging,
        moderateness_slopes: (slope_a, slope_b),
        glaeser_exponents: (
            gl_a.exponent_fit.map(|f| f.slope),
            gl_b.exponent_fit.map(|f| f.slope),
        ),
    })
}

/// Measured data-norm exponent `N` such that
/// `||g0_eps||^2_{H^3} + ||g1_eps||^2_{H^2} + int ||f_eps||^2_{H^2}`
/// grows like `eps^{-N}`; Example-1 sensitivity chooses
/// `omega^2(eps) = eps^{N+1}` from it.
pub fn data_exponent(
    g0: &DataNet,
    g1: &DataNet,
    ladder: &[f64],
    grid: &Grid,
    horizon: f64,
) -> Result<SlopeFit> {
    let _ = horizon;
    let mut combo = Vec::with_capacity(ladder.len());
    for i in 0..ladder.len() {
        let (n0, _) = fourier_sobolev(&g0.per_eps[i], grid, 3)?;
        let (n1, _) = fourier_sobolev(&g1.per_eps[i], grid, 2)?;
        combo.push(n0[3] * n0[3] + n1[2] * n1[2]);
    }
    fit_vs_inverse_eps(ladder, &combo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::regularize;
    use crate::grid::BoundaryMode;
    use crate::mollifier::{build_bump, geometric_ladder, PositiveScale};
    use crate::solver::{state_vector, DataField};
    use approx::assert_abs_diff_eq;

    #[test]
    fn moderateness_exact_power_laws() {
        let ladder = geometric_ladder(2, 9);
        let ys: Vec<f64> = ladder.iter().map(|e| e.powi(-2)).collect();
        let fit = moderateness_fit(&ladder, &ys, "L2", 10.0, 3.0).unwrap();
        assert_abs_diff_eq!(fit.fit.slope, 2.0, epsilon = 1e-6);
        assert_eq!(fit.verdict, ModerateVerdict::Moderate);

        let ys: Vec<f64> = ladder.iter().map(|e| e.powi(3)).collect();
        let fit = moderateness_fit(&ladder, &ys, "L2", 10.0, 3.0).unwrap();
        assert_eq!(fit.verdict, ModerateVerdict::NegligibleTrend);

        let ys: Vec<f64> = ladder.iter().map(|e| e.powi(-20)).collect();
        let fit = moderateness_fit(&ladder, &ys, "L2", 10.0, 3.0).unwrap();
        assert_eq!(fit.verdict, ModerateVerdict::ExceedsCap);
    }

    #[test]
    fn moderateness_rejects_nonfinite() {
        let ladder = geometric_ladder(2, 6);
        let mut ys = vec![1.0; 5];
        ys[2] = f64::NAN;
        assert!(moderateness_fit(&ladder, &ys, "L2", 10.0, 3.0).is_err());
    }

    #[test]
    fn gronwall_integral_golden_ratio_oracle() {
        // phi' = phi + int phi, phi(0) = 1: phi(t) = A e^{r+ t} + B e^{r- t},
        // frozen by the closed form: phi(1) = 3.7982457297711942
        let times: Vec<f64> = (0..=64).map(|k| k as f64 / 64.0).collect();
        let rp = (1.0 + 5.0f64.sqrt()) / 2.0;
        let rm = (1.0 - 5.0f64.sqrt()) / 2.0;
        let a = rp / 5.0f64.sqrt();
        let b = 1.0 - a;
        let phi: Vec<f64> = times
            .iter()
            .map(|&t| a * (rp * t).exp() + b * (rm * t).exp())
            .collect();
        assert_abs_diff_eq!(phi[64], 3.7982457297711942, epsilon = 1e-12);
        let psi = vec![0.0; times.len()];
        let v = gronwall_integral_check(&phi, &psi, &times, 1.0, 1.0, 1e-4).unwrap();
        assert!(v.pass, "exact solution must sit on the envelope: {v:?}");
        assert!(v.worst_ratio > 0.999, "envelope should be sharp");
    }

    #[test]
    fn gronwall_integral_classical_reduction() {
        // C2 = 0, psi = 0: envelope is e^{C1 t}
        let times: Vec<f64> = (0..=32).map(|k| k as f64 / 32.0).collect();
        let phi: Vec<f64> = times.iter().map(|&t| (0.9 * t).exp()).collect();
        let v = gronwall_integral_check(&phi, &vec![0.0; 33], &times, 1.0, 0.0, 0.01).unwrap();
        assert!(v.pass);
        // violating trace rejected
        let bad: Vec<f64> = times.iter().map(|&t| (2.0 * t).exp()).collect();
        let v = gronwall_integral_check(&bad, &vec![0.0; 33], &times, 1.0, 0.0, 0.01).unwrap();
        assert!(!v.pass);
    }

    #[test]
    fn energy_of_conserved_run() {
        let grid = Grid::new_1d(1024, 8.0, BoundaryMode::Periodic)
            .with_horizon(1.0)
            .with_stride(16);
        let ladder = [0.25];
        let net = regularize(
            &CoefficientField::Constant { value: 1.0 },
            &build_bump(1.0, 1.0 / 128.0).unwrap(),
            &PositiveScale::power(1.0),
            &ladder,
            &grid,
        )
        .unwrap();
        let g0 = DataNet {
            per_eps: vec![grid.sample(|x| (-x * x).exp())],
        };
        let g1 = DataNet::zero(1, &grid);
        let traces = solve(&[&net], &ForcingNet::Zero, &g0, &g1, &grid).unwrap();
        let states = state_vector(&traces[0]).unwrap();
        let et = energy(&states, &[&net], 0, &traces[0].times, &traces[0].forcing_l2).unwrap();
        let e0 = et.energy[0];
        for &e in &et.energy {
            assert!((e - e0).abs() <= 1e-3 * e0, "drift {:.3e}", (e - e0) / e0);
        }
        // lower bound holds at every checkpoint
        for (e, l) in et.energy.iter().zip(&et.last_sq) {
            assert!(l <= &(e * (1.0 + 1e-12)));
        }
        // Groenwall check needs a denser checkpoint ladder
        let fine = Grid::new_1d(1024, 8.0, BoundaryMode::Periodic)
            .with_horizon(1.0)
            .with_stride(4);
        let traces = solve(&[&net], &ForcingNet::Zero, &g0, &g1, &fine).unwrap();
        let states = state_vector(&traces[0]).unwrap();
        let et = energy(&states, &[&net], 0, &traces[0].times, &traces[0].forcing_l2).unwrap();
        let verdict = gronwall_check(&et, 0.05).unwrap();
        assert!(verdict.pass);
    }

    #[test]
    fn degenerate_energy_is_velocity_norm() {
        let grid = Grid::new_1d(256, 4.0, BoundaryMode::Periodic)
            .with_horizon(0.5)
            .with_stride(4);
        let net = regularize(
            &CoefficientField::Constant { value: 0.0 },
            &build_bump(1.0, 1.0 / 128.0).unwrap(),
            &PositiveScale::power(1.0),
            &[0.25],
            &grid,
        )
        .unwrap();
        let g0 = DataNet::zero(1, &grid);
        let g1 = DataNet {
            per_eps: vec![grid.sample(|x| (-x * x).exp())],
        };
        let traces = solve(&[&net], &ForcingNet::Zero, &g0, &g1, &grid).unwrap();
        let states = state_vector(&traces[0]).unwrap();
        let et = energy(&states, &[&net], 0, &traces[0].times, &traces[0].forcing_l2).unwrap();
        for (e, l) in et.energy.iter().zip(&et.last_sq) {
            assert_abs_diff_eq!(e, l, epsilon = 1e-14);
        }
    }

    #[test]
    fn synthetic_violating_energy_fails() {
        let times: Vec<f64> = (0..=63).map(|k| k as f64 / 63.0).collect();
        let c = 2.0;
        let e0 = 1.0;
        let energy: Vec<f64> = times.iter().map(|&t| e0 * (2.0 * c * t).exp()).collect();
        let bound: Vec<f64> = times.iter().map(|&t| e0 * (c * t).exp()).collect();
        let et = EnergyTrace {
            eps: 0.1,
            times: times.clone(),
            last_sq: vec![0.0; times.len()],
            energy,
            bound,
            c,
            m_eps: 1.0,
        };
        let v = gronwall_check(&et, 0.05).unwrap();
        assert!(!v.pass);
        assert!(v.worst_ratio > 2.0);
    }

    #[test]
    fn consistency_constant_coefficient() {
        let grid = Grid::new_1d(1024, 6.0, BoundaryMode::Periodic)
            .with_horizon(0.5)
            .with_stride(16);
        let vm = crate::mollifier::build_vanishing_moments(4, 1.0, 1.0 / 16.0).unwrap();
        let bumpk = build_bump(1.0, 1.0 / 256.0).unwrap();
        let ladder = geometric_ladder(2, 7);
        let rep = consistency_test(&ConsistencyInputs {
            field: &CoefficientField::Constant { value: 1.0 },
            coeff_kernel: &bumpk,
            data_kernel: &vm,
            scale: &PositiveScale::power(1.0),
            ladder: &ladder,
            grid: &grid,
            g0: &DataDescriptor::one_d(DataField::Bump {
                center: 0.0,
                radius: 1.5,
                amplitude: 1.0,
            }),
            g1: &DataDescriptor::one_d(DataField::Zero),
            k_max: 2,
        })
        .unwrap();
        assert_eq!(rep.reference, ReferenceKind::DAlembert);
        assert!(rep.monotone_to_floor, "errors: {:?}", rep.sup_errors);
        let dfit = rep.data_error_fit.expect("enough rungs above floor");
        assert!(
            -dfit.slope >= 4.0,
            "data error decay order {:.2} < 4",
            -dfit.slope
        );
    }
}
