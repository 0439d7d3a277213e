//! `weakwave`: experiment orchestration for the very-weak-solution
//! laboratory.
//!
//! Subcommands: `run` (execute a configured experiment), `verify` (algebraic
//! and oracle self-checks), `sweep` (cartesian kernel x scale sweeps),
//! `report` (render plots and a verdict summary from a run directory).
//!
//! Exit codes: 0 ok, 1 compute failure, 2 configuration error.

mod config;
mod plots;
mod report_cmd;
mod runner;
mod verify_cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "weakwave", version, about = "Very weak solutions of weakly hyperbolic wave equations: regularized sweeps, energy estimates, asymptotic fits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured experiment; artifacts land in a fresh run
    /// directory under the output root.
    Run {
        /// Path to the experiment JSON.
        config: PathBuf,
        /// Output root (default: $WEAKWAVE_OUT or ./runs).
        #[arg(long)]
        out_root: Option<PathBuf>,
    },
    /// Algebraic and oracle self-checks.
    Verify {
        #[command(subcommand)]
        target: verify_cmd::VerifyTarget,
    },
    /// Cartesian sweep over the `sweep.kernels` x `sweep.scales` lists of
    /// the config.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out_root: Option<PathBuf>,
    },
    /// Render plots and a markdown summary from an existing run directory.
    Report {
        run_dir: PathBuf,
    },
}

fn output_root(cli_flag: Option<PathBuf>) -> PathBuf {
    cli_flag
        .or_else(|| std::env::var_os("WEAKWAVE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Compute(msg)) => {
            eprintln!("compute error: {msg}");
            ExitCode::from(1)
        }
    }
}

enum AppError {
    Config(String),
    Compute(String),
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Run { config, out_root } => {
            let cfg = load_config(&config)?;
            let dir = runner::fresh_run_dir(&output_root(out_root), &cfg.label)
                .map_err(|e| AppError::Compute(e.to_string()))?;
            let summary = runner::execute(&cfg, &dir)
                .map_err(|e| AppError::Compute(format!("{e:#}")))?;
            println!("run directory: {}", dir.display());
            for v in &summary.verdicts {
                println!(
                    "{} {:<14} {}",
                    if v.pass { "PASS" } else { "FAIL" },
                    v.analysis,
                    v.detail
                );
            }
            if summary.verdicts.iter().all(|v| v.pass) {
                Ok(())
            } else {
                Err(AppError::Compute("one or more analyses failed".into()))
            }
        }
        Command::Verify { target } => verify_cmd::run(target),
        Command::Sweep { config, out_root } => {
            let cfg = load_config(&config)?;
            let sweep = cfg
                .sweep
                .clone()
                .ok_or_else(|| AppError::Config("config has no `sweep` section".into()))?;
            let root = runner::fresh_run_dir(&output_root(out_root), &format!("{}_sweep", cfg.label))
                .map_err(|e| AppError::Compute(e.to_string()))?;
            let mut rows = Vec::new();
            for (ki, kernel) in sweep.kernels.iter().enumerate() {
                for (si, scale) in sweep.scales.iter().enumerate() {
                    let mut combo = cfg.clone();
                    combo.regularization.coefficient_kernel = kernel.clone();
                    combo.regularization.scale = scale.clone();
                    combo.label = format!("{}_k{ki}_s{si}", cfg.label);
                    combo
                        .validate()
                        .map_err(|e| AppError::Config(e.to_string()))?;
                    let sub = root.join(format!("k{ki}_s{si}"));
                    std::fs::create_dir_all(&sub)
                        .map_err(|e| AppError::Compute(e.to_string()))?;
                    let summary = runner::execute(&combo, &sub)
                        .map_err(|e| AppError::Compute(format!("{e:#}")))?;
                    println!(
                        "combo k{ki} x s{si}: {} verdicts, all pass = {}",
                        summary.verdicts.len(),
                        summary.verdicts.iter().all(|v| v.pass)
                    );
                    rows.push(serde_json::json!({
                        "kernel": ki,
                        "scale": si,
                        "summary": summary,
                    }));
                }
            }
            weakwave_core::report::write_json(&root.join("sweep_summary.json"), &rows)
                .map_err(|e| AppError::Compute(e.to_string()))?;
            println!("sweep directory: {}", root.display());
            Ok(())
        }
        Command::Report { run_dir } => report_cmd::run(&run_dir),
    }
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig, AppError> {
    let cfg =
        ExperimentConfig::from_path(path).map_err(|e| AppError::Config(format!("{e:#}")))?;
    cfg.validate().map_err(|e| AppError::Config(e.to_string()))?;
    Ok(cfg)
}
