//! `weakwave verify`: algebraic identity checks and solver oracles with a
//! printed residual table; nonzero exit on any failure.

use clap::Subcommand;
use rand::SeedableRng;

use weakwave_core::coefficients::{regularize, CoefficientField};
use weakwave_core::grid::{BoundaryMode, Grid};
use weakwave_core::mollifier::{build_bump, PositiveScale};
use weakwave_core::solver::{dalembert_oracle, solve, DataNet, ForcingNet};
use weakwave_core::system::{
    build_system, derive_system, verify_energy_identities, verify_q_lower_bound,
    verify_symmetriser, CoefficientSamples,
};

use crate::AppError;

#[derive(Subcommand)]
pub enum VerifyTarget {
    /// `Q A_k = A_k^T Q` exactness over random non-negative coefficients.
    Symmetriser {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        max_level: usize,
        #[arg(long, default_value_t = 16)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Displayed energy-identity formulas vs dense brute force.
    Identities {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, default_value_t = 64)]
        points: usize,
    },
    /// Constant-coefficient solve vs the d'Alembert closed form, plus the
    /// grid-refinement convergence order.
    Oracle {
        #[arg(long, default_value_t = 2048)]
        points: usize,
    },
}

pub fn run(target: VerifyTarget) -> Result<(), AppError> {
    match target {
        VerifyTarget::Symmetriser {
            n,
            max_level,
            points,
            seed,
        } => {
            let mut ok = true;
            println!("n  level  max |QA_k - A_k^T Q|");
            for dim in 1..=n {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed + dim as u64);
                let coeffs = CoefficientSamples::random(dim, points, &mut rng);
                let mut sys = build_system(dim, coeffs).map_err(compute)?;
                for level in 0..=max_level.min(2) {
                    let r = verify_symmetriser(&sys);
                    println!("{dim}  {level}      {r:e}");
                    ok &= r == 0.0;
                    ok &= verify_q_lower_bound(&sys, 100, seed);
                    if level < 2 {
                        sys = derive_system(&sys).map_err(compute)?;
                    }
                }
            }
            finish(ok, "symmetriser residual nonzero")
        }
        VerifyTarget::Identities {
            n,
            trials,
            seed,
            level,
            points,
        } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let coeffs = CoefficientSamples::random(n, points, &mut rng);
            let mut sys = build_system(n, coeffs).map_err(compute)?;
            for _ in 0..level.clamp(1, 2) {
                sys = derive_system(&sys).map_err(compute)?;
            }
            let rep = verify_energy_identities(&sys, trials, seed).map_err(compute)?;
            println!("identity                          max rel err");
            for c in &rep.checks {
                println!("{:<34}{:e}", c.name, c.max_rel_error);
            }
            finish(
                rep.max_rel_error() <= 1e-10,
                "identity residual beyond 1e-10",
            )
        }
        VerifyTarget::Oracle { points } => {
            let err_at = |pts: usize| -> Result<f64, AppError> {
                let grid = Grid::new_1d(pts, 8.0, BoundaryMode::Periodic).with_horizon(1.0);
                let net = regularize(
                    &CoefficientField::Constant { value: 1.0 },
                    &build_bump(1.0, 1.0 / 128.0).map_err(compute)?,
                    &PositiveScale::power(1.0),
                    &[0.25],
                    &grid,
                )
                .map_err(compute)?;
                let g0 = DataNet {
                    per_eps: vec![grid.sample(|x| (-x * x).exp())],
                };
                let g1 = DataNet::zero(1, &grid);
                let traces =
                    solve(&[&net], &ForcingNet::Zero, &g0, &g1, &grid).map_err(compute)?;
                let u = traces[0].final_snapshot();
                let g = |x: f64| (-x * x).exp();
                let z = |_: f64| 0.0;
                let mut err2 = 0.0;
                let mut ref2 = 0.0;
                for i in 0..grid.points {
                    let r = dalembert_oracle(1.0, &g, &z, 1.0, grid.coord(i));
                    err2 += (u[i].re - r).powi(2);
                    ref2 += r * r;
                }
                Ok((err2 / ref2).sqrt())
            };
            let e_full = err_at(points)?;
            let e_half = err_at(points / 2)?;
            let e_quarter = err_at(points / 4)?;
            let order = (e_quarter / e_half).log2().min((e_half / e_full).log2());
            println!("points  rel L2 error vs d'Alembert");
            println!("{:<8}{:e}", points / 4, e_quarter);
            println!("{:<8}{:e}", points / 2, e_half);
            println!("{:<8}{:e}", points, e_full);
            println!("observed convergence order >= {order:.3}");
            finish(
                e_full <= 1e-3 && (order - 2.0).abs() <= 0.3,
                "oracle tolerance or order missed",
            )
        }
    }
}

fn compute(e: weakwave_core::Error) -> AppError {
    AppError::Compute(e.to_string())
}

fn finish(ok: bool, msg: &str) -> Result<(), AppError> {
    if ok {
        println!("verification OK");
        Ok(())
    } else {
        Err(AppError::Compute(msg.into()))
    }
}
