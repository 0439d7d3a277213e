//! Experiment execution: build the regularizations, run the sweep, run the
//! requested analyses, persist everything under an append-only run
//! directory.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;

use weakwave_core::analysis::{
    consistency_test, data_exponent, energy, gronwall_check, mollifier_sensitivity,
    moderateness_fit, sobolev_norms, ConsistencyInputs, SensitivityInputs,
};
use weakwave_core::coefficients::{glaeser_check, regularize, RegularizedNet, GLAESER_FLOOR};
use weakwave_core::mollifier::PositiveScale;
use weakwave_core::report::{
    rung_tag, write_json, write_net_csv, write_trace_csv, write_trace_sidecar,
};
use weakwave_core::solver::{solve, state_vector, DataNet, ForcingNet, SolveTrace};

use crate::config::{AnalysisKind, ExperimentConfig};

/// Outcome summary written to `summary.json`.
#[derive(Debug, Default, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub ladder: Vec<f64>,
    pub omegas: Vec<f64>,
    pub dt: Option<f64>,
    pub verdicts: Vec<VerdictLine>,
}

#[derive(Debug, Serialize)]
pub struct VerdictLine {
    pub analysis: String,
    pub pass: bool,
    pub detail: String,
}

/// Create `{root}/{label}_{stamp}` without ever overwriting an existing
/// directory (suffixes `_1`, `_2`, ... on collision).
pub fn fresh_run_dir(root: &Path, label: &str) -> anyhow::Result<PathBuf> {
    let stamp = chrono::Local::now().format("%Y%m%d_%H%M%S");
    let base = root.join(format!("{label}_{stamp}"));
    let mut dir = base.clone();
    let mut k = 0;
    while dir.exists() {
        k += 1;
        dir = PathBuf::from(format!("{}_{k}", base.display()));
    }
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

pub fn execute(config: &ExperimentConfig, run_dir: &Path) -> anyhow::Result<RunSummary> {
    let reports = run_dir.join("reports");
    std::fs::create_dir_all(&reports)?;

    // resolved config echo
    write_json(&run_dir.join("config.json"), config)?;

    let dim = config.problem.dimension;
    let grid = config.discretization.grid(dim);
    let ladder = config.regularization.ladder.values();
    let coeff_kernel = config
        .regularization
        .coefficient_kernel
        .build()
        .context("coefficient kernel")?;
    let data_kernel = config
        .regularization
        .data_kernel
        .build()
        .context("data kernel")?;

    // data nets at scale eps
    let g0 = DataNet::from_descriptor(&config.problem.g0, &data_kernel, &ladder, &grid)?;
    let g1 = DataNet::from_descriptor(&config.problem.g1, &data_kernel, &ladder, &grid)?;
    let forcing = match &config.problem.forcing {
        None => ForcingNet::Zero,
        Some(f) => ForcingNet::Separable {
            time: f.time.clone(),
            space: ladder
                .iter()
                .map(|&e| f.space.regularize(&data_kernel, e, &grid))
                .collect::<weakwave_core::Result<Vec<_>>>()?,
        },
    };

    // coefficient scale, possibly chosen from the measured data exponent
    let scale = resolve_scale(config, &g0, &g1, &ladder, &grid)?;

    // coefficient nets, one per axis
    let nets: Vec<RegularizedNet> = config
        .problem
        .coefficients
        .iter()
        .map(|field| regularize(field, &coeff_kernel, &scale, &ladder, &grid))
        .collect::<weakwave_core::Result<Vec<_>>>()?;
    let net_refs: Vec<&RegularizedNet> = nets.iter().collect();

    let mut summary = RunSummary {
        label: config.label.clone(),
        ladder: ladder.clone(),
        omegas: ladder.iter().map(|&e| scale.omega(e)).collect(),
        dt: None,
        verdicts: Vec::new(),
    };

    if config.output.nets {
        let dir = run_dir.join("nets");
        std::fs::create_dir_all(&dir)?;
        for (ax, net) in nets.iter().enumerate() {
            for (i, &eps) in ladder.iter().enumerate() {
                let p = dir.join(format!("net_ax{ax}_{}.csv", rung_tag(eps, &net.kernel.id)));
                write_net_csv(net, i, &p)?;
            }
        }
    }

    // solves (skipped when nothing needs them)
    let needs_solve = config.analyses.iter().any(|a| {
        matches!(
            a,
            AnalysisKind::Energy
                | AnalysisKind::Gronwall
                | AnalysisKind::Sobolev
                | AnalysisKind::Moderateness
        )
    }) || config.output.traces;
    let traces: Option<Vec<SolveTrace>> = if needs_solve {
        let tr = solve(&net_refs, &forcing, &g0, &g1, &grid)?;
        summary.dt = tr.first().map(|t| t.dt);
        Some(tr)
    } else {
        None
    };

    if let (true, Some(tr)) = (config.output.traces, &traces) {
        let dir = run_dir.join("traces");
        std::fs::create_dir_all(&dir)?;
        for t in tr {
            let tag = rung_tag(t.eps, &t.kernel_id);
            write_trace_csv(t, &dir.join(format!("trace_{tag}.csv")))?;
            write_trace_sidecar(t, &dir.join(format!("trace_{tag}.json")))?;
        }
    }

    for analysis in &config.analyses {
        match analysis {
            AnalysisKind::Glaeser => {
                for (ax, net) in nets.iter().enumerate() {
                    let rep = glaeser_check(net, GLAESER_FLOOR, 1e-6)?;
                    let worst = rep.rho.iter().cloned().fold(0.0f64, f64::max);
                    write_json(&reports.join(format!("glaeser_ax{ax}.json")), &rep)?;
                    summary.verdicts.push(VerdictLine {
                        analysis: format!("glaeser[axis {ax}]"),
                        pass: worst <= 1.0 + 1e-6,
                        detail: format!("worst rho = {worst:.8}"),
                    });
                }
            }
            AnalysisKind::Energy | AnalysisKind::Gronwall => {
                let tr = traces.as_ref().expect("solve ran");
                let mut rows = Vec::new();
                let mut all_pass = true;
                let mut worst = 0.0f64;
                for (i, t) in tr.iter().enumerate() {
                    let states = state_vector(t)?;
                    let et = energy(&states, &net_refs, i, &t.times, &t.forcing_l2)?;
                    write_json(
                        &reports.join(format!("energy_{}.json", rung_tag(t.eps, &t.kernel_id))),
                        &et,
                    )?;
                    if matches!(analysis, AnalysisKind::Gronwall) {
                        let v = gronwall_check(&et, 0.05)?;
                        all_pass &= v.pass;
                        worst = worst.max(v.worst_ratio);
                        rows.push((t.eps, v));
                    }
                }
                if matches!(analysis, AnalysisKind::Gronwall) {
                    write_json(&reports.join("gronwall.json"), &rows)?;
                    summary.verdicts.push(VerdictLine {
                        analysis: "gronwall".into(),
                        pass: all_pass,
                        detail: format!("worst E/bound = {worst:.4}"),
                    });
                }
            }
            AnalysisKind::Sobolev => {
                let tr = traces.as_ref().expect("solve ran");
                let mut tables = Vec::new();
                for t in tr {
                    tables.push(sobolev_norms(t, config.sobolev_k_max)?);
                }
                write_json(&reports.join("sobolev.json"), &tables)?;
                let aliasing = tables.iter().any(|t| t.aliasing_warning);
                summary.verdicts.push(VerdictLine {
                    analysis: "sobolev".into(),
                    pass: !aliasing,
                    detail: if aliasing {
                        "aliasing warning on the top norm".into()
                    } else {
                        format!("k_max = {}", config.sobolev_k_max)
                    },
                });
            }
            AnalysisKind::Moderateness => {
                let tr = traces.as_ref().expect("solve ran");
                let sups: Vec<f64> = tr.iter().map(|t| t.sup_l2()).collect();
                let budget = 2.0 * grid.horizon * coeff_kernel.deriv1_sup() + 0.5;
                let fit = moderateness_fit(&ladder, &sups, "sup_t L2", budget, 3.0)?;
                write_json(&reports.join("moderateness.json"), &fit)?;
                summary.verdicts.push(VerdictLine {
                    analysis: "moderateness".into(),
                    pass: !matches!(
                        fit.verdict,
                        weakwave_core::analysis::ModerateVerdict::ExceedsCap
                    ),
                    detail: format!("slope {:.4} vs cap {budget:.4}", fit.fit.slope),
                });
            }
            AnalysisKind::Consistency => {
                let rep = consistency_test(&ConsistencyInputs {
                    field: &config.problem.coefficients[0],
                    coeff_kernel: &coeff_kernel,
                    data_kernel: &data_kernel,
                    scale: &scale,
                    ladder: &ladder,
                    grid: &grid,
                    g0: &config.problem.g0,
                    g1: &config.problem.g1,
                    k_max: config.sobolev_k_max.min(2),
                })?;
                write_json(&reports.join("consistency.json"), &rep)?;
                summary.verdicts.push(VerdictLine {
                    analysis: "consistency".into(),
                    pass: rep.monotone_to_floor,
                    detail: format!(
                        "floor {:.3e}, data order {}",
                        rep.scheme_floor,
                        rep.data_error_fit
                            .as_ref()
                            .map(|f| format!("{:.2}", -f.slope))
                            .unwrap_or_else(|| "n/a".into())
                    ),
                });
            }
            AnalysisKind::Sensitivity => {
                let spec = config
                    .sensitivity
                    .as_ref()
                    .ok_or_else(|| anyhow!("sensitivity spec missing"))?;
                let second = spec.second_kernel.build()?;
                let rep = mollifier_sensitivity(&SensitivityInputs {
                    field: &config.problem.coefficients[0],
                    kernel_a: &coeff_kernel,
                    kernel_b: &second,
                    data_kernel: &data_kernel,
                    scale: &scale,
                    ladder: &ladder,
                    grid: &grid,
                    g0: &config.problem.g0,
                    g1: &config.problem.g1,
                })?;
                write_json(&reports.join("sensitivity.json"), &rep)?;
                summary.verdicts.push(VerdictLine {
                    analysis: "sensitivity".into(),
                    pass: rep.converging,
                    detail: format!(
                        "diff slope {:.3}, envelope constant {:.3e}",
                        rep.diff_fit.as_ref().map(|f| f.slope).unwrap_or(f64::NAN),
                        rep.fitted_constant
                    ),
                });
            }
        }
    }

    write_json(&run_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// The configured scale, or `omega^2 = eps^{N+1}` with `N` measured from the
/// data norms when the sensitivity spec asks for it.
fn resolve_scale(
    config: &ExperimentConfig,
    g0: &DataNet,
    g1: &DataNet,
    ladder: &[f64],
    grid: &weakwave_core::Grid,
) -> anyhow::Result<PositiveScale> {
    if let Some(spec) = &config.sensitivity {
        if spec.scale_from_data_exponent {
            let fit = data_exponent(g0, g1, ladder, grid, config.discretization.horizon)?;
            let n_hat = fit.slope.max(0.0);
            return Ok(PositiveScale::power((n_hat + 1.0) / 2.0));
        }
    }
    Ok(config.regularization.scale.clone())
}
