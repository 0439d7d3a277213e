//! `weakwave report`: render plots (SVG) and a markdown summary from the
//! JSON reports of a run directory. Missing reports give warnings and a
//! partial render; an empty directory is an error.

use std::fmt::Write as _;
use std::path::Path;

use crate::plots::{render, PlotSpec, Series};
use crate::AppError;

pub fn run(run_dir: &Path) -> Result<(), AppError> {
    let reports = run_dir.join("reports");
    if !reports.is_dir() {
        return Err(AppError::Compute(format!(
            "{} has no reports/ directory",
            run_dir.display()
        )));
    }
    let plots_dir = run_dir.join("plots");
    std::fs::create_dir_all(&plots_dir).map_err(io)?;

    let mut rendered = 0usize;
    let mut md = String::from("# Run summary\n\n");

    // summary verdicts
    if let Ok(text) = std::fs::read_to_string(run_dir.join("summary.json")) {
        if let Ok(v) = serde_json::from_str::<serde_json::Value>(&text) {
            if let Some(verdicts) = v["verdicts"].as_array() {
                md.push_str("| analysis | verdict | detail |\n|---|---|---|\n");
                for row in verdicts {
                    let _ = writeln!(
                        md,
                        "| {} | {} | {} |",
                        row["analysis"].as_str().unwrap_or("?"),
                        if row["pass"].as_bool().unwrap_or(false) {
                            "PASS"
                        } else {
                            "FAIL"
                        },
                        row["detail"].as_str().unwrap_or("")
                    );
                }
                md.push('\n');
            }
        }
    } else {
        eprintln!("warning: no summary.json");
    }

    // moderateness: norms vs 1/eps with the fitted line
    match read_json(&reports.join("moderateness.json")) {
        Some(fit) => {
            let ladder = f64_vec(&fit["ladder"]);
            let norms = f64_vec(&fit["norms"]);
            let slope = fit["fit"]["slope"].as_f64().unwrap_or(f64::NAN);
            let intercept = fit["fit"]["intercept"].as_f64().unwrap_or(0.0);
            let inv: Vec<f64> = ladder.iter().map(|e| 1.0 / e).collect();
            let fitted: Vec<f64> = inv
                .iter()
                .map(|&x| (intercept + slope * x.ln()).exp())
                .collect();
            render(
                &PlotSpec {
                    title: &format!("moderateness: fitted slope {slope:.3}"),
                    x_label: "1/eps",
                    y_label: fit["norm_kind"].as_str().unwrap_or("norm"),
                    log_x: true,
                    log_y: true,
                },
                &[
                    Series {
                        label: "measured".into(),
                        xs: inv.clone(),
                        ys: norms,
                    },
                    Series {
                        label: format!("fit slope {slope:.3}"),
                        xs: inv,
                        ys: fitted,
                    },
                ],
                &plots_dir.join("moderateness.svg"),
            )
            .map_err(io)?;
            rendered += 1;
            let _ = writeln!(md, "![moderateness](plots/moderateness.svg)\n");
        }
        None => eprintln!("warning: no moderateness report"),
    }

    // energy vs bound, one plot per rung
    let mut energy_files: Vec<_> = std::fs::read_dir(&reports)
        .map_err(io)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .and_then(|s| s.to_str())
                .map(|s| s.starts_with("energy_") && s.ends_with(".json"))
                .unwrap_or(false)
        })
        .collect();
    energy_files.sort();
    for p in &energy_files {
        if let Some(et) = read_json(p) {
            let times = f64_vec(&et["times"]);
            let e = f64_vec(&et["energy"]);
            let b = f64_vec(&et["bound"]);
            let stem = p.file_stem().unwrap().to_string_lossy().to_string();
            render(
                &PlotSpec {
                    title: &format!("{stem}: E(t) vs bound"),
                    x_label: "t",
                    y_label: "energy",
                    log_x: false,
                    log_y: true,
                },
                &[
                    Series {
                        label: "E(t)".into(),
                        xs: times.clone(),
                        ys: e,
                    },
                    Series {
                        label: "(E(0)+int ||f||^2) e^{ct}".into(),
                        xs: times,
                        ys: b,
                    },
                ],
                &plots_dir.join(format!("{stem}.svg")),
            )
            .map_err(io)?;
            rendered += 1;
        }
    }
    if !energy_files.is_empty() {
        let _ = writeln!(md, "Energy/bound plots: {} rungs.\n", energy_files.len());
    }

    // sensitivity: paired-kernel difference and envelope
    match read_json(&reports.join("sensitivity.json")) {
        Some(rep) => {
            let ladder = f64_vec(&rep["ladder"]);
            let inv: Vec<f64> = ladder.iter().map(|e| 1.0 / e).collect();
            let diff = f64_vec(&rep["sup_diff"]);
            let env = f64_vec(&rep["envelope"]);
            let env_sqrt: Vec<f64> = env.iter().map(|v| v.max(0.0).sqrt()).collect();
            render(
                &PlotSpec {
                    title: "mollifier sensitivity: ||u - u~||_L2 and envelope^(1/2)",
                    x_label: "1/eps",
                    y_label: "L2 difference",
                    log_x: true,
                    log_y: true,
                },
                &[
                    Series {
                        label: "sup_t ||u - u~||".into(),
                        xs: inv.clone(),
                        ys: diff,
                    },
                    Series {
                        label: "(omega^2 lambda)^(1/2)".into(),
                        xs: inv,
                        ys: env_sqrt,
                    },
                ],
                &plots_dir.join("sensitivity.svg"),
            )
            .map_err(io)?;
            rendered += 1;
            let _ = writeln!(md, "![sensitivity](plots/sensitivity.svg)\n");
        }
        None => eprintln!("warning: no sensitivity report"),
    }

    // Glaeser: M_eps growth
    for ax in 0..2 {
        let p = reports.join(format!("glaeser_ax{ax}.json"));
        if let Some(rep) = read_json(&p) {
            let omega = f64_vec(&rep["omega"]);
            let inv: Vec<f64> = omega.iter().map(|w| 1.0 / w).collect();
            let m = f64_vec(&rep["m_eps"]);
            let rho = f64_vec(&rep["rho"]);
            render(
                &PlotSpec {
                    title: &format!("Glaeser axis {ax}: M_eps and worst rho"),
                    x_label: "1/omega",
                    y_label: "value",
                    log_x: true,
                    log_y: true,
                },
                &[
                    Series {
                        label: "M_eps".into(),
                        xs: inv.clone(),
                        ys: m,
                    },
                    Series {
                        label: "worst rho".into(),
                        xs: inv,
                        ys: rho,
                    },
                ],
                &plots_dir.join(format!("glaeser_ax{ax}.svg")),
            )
            .map_err(io)?;
            rendered += 1;
        }
    }

    if rendered == 0 {
        return Err(AppError::Compute(
            "no renderable reports found in the run directory".into(),
        ));
    }
    std::fs::write(run_dir.join("summary.md"), md).map_err(io)?;
    println!(
        "rendered {rendered} plot(s) into {}",
        plots_dir.display()
    );
    Ok(())
}

fn read_json(path: &Path) -> Option<serde_json::Value> {
    let text = std::fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

fn f64_vec(v: &serde_json::Value) -> Vec<f64> {
    v.as_array()
        .map(|a| a.iter().filter_map(|x| x.as_f64()).collect())
        .unwrap_or_default()
}

fn io(e: std::io::Error) -> AppError {
    AppError::Compute(e.to_string())
}
