//! CSV / JSON persistence for traces, nets and analysis reports.
//!
//! CSV payloads are written with `Display`-formatted floats (shortest
//! round-trip representation), so identical runs produce byte-identical
//! files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::coefficients::RegularizedNet;
use crate::error::Result;
use crate::solver::SolveTrace;

/// Serialize any report as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(f, value)?;
    Ok(())
}

/// Snapshot CSV: `t, x..., re(u), im(u)` rows for every checkpoint.
pub fn write_trace_csv(trace: &SolveTrace, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match trace.grid.dim {
        1 => {
            writeln!(w, "t,x,re_u,im_u")?;
            for (t, snap) in trace.times.iter().zip(&trace.snapshots) {
                for (i, v) in snap.iter().enumerate() {
                    writeln!(w, "{},{},{},{}", t, trace.grid.coord(i), v.re, v.im)?;
                }
            }
        }
        2 => {
            writeln!(w, "t,x1,x2,re_u,im_u")?;
            let n = trace.grid.points;
            for (t, snap) in trace.times.iter().zip(&trace.snapshots) {
                for i in 0..n {
                    for j in 0..n {
                        let v = snap[trace.grid.idx2(i, j)];
                        writeln!(
                            w,
                            "{},{},{},{},{}",
                            t,
                            trace.grid.coord(i),
                            trace.grid.coord(j),
                            v.re,
                            v.im
                        )?;
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

/// Metadata sidecar for a trace.
#[derive(Debug, Serialize)]
pub struct TraceMeta<'a> {
    pub eps: f64,
    pub omega: f64,
    pub dt: f64,
    pub steps: usize,
    pub checkpoint_stride: usize,
    pub kernel_id: &'a str,
    pub scale_id: &'a str,
    pub grid_points: usize,
    pub grid_extent: f64,
    pub grid_dim: usize,
    pub horizon: f64,
}

pub fn write_trace_sidecar(trace: &SolveTrace, path: &Path) -> Result<()> {
    write_json(
        path,
        &TraceMeta {
            eps: trace.eps,
            omega: trace.omega,
            dt: trace.dt,
            steps: trace.steps,
            checkpoint_stride: trace.checkpoint_stride,
            kernel_id: &trace.kernel_id,
            scale_id: &trace.scale_id,
            grid_points: trace.grid.points,
            grid_extent: trace.grid.extent,
            grid_dim: trace.grid.dim,
            horizon: trace.grid.horizon,
        },
    )
}

/// Deterministic file-name fragment for a rung: epsilon plus kernel id.
pub fn rung_tag(eps: f64, kernel_id: &str) -> String {
    format!("eps{:.6e}_{}", eps, kernel_id.replace('.', "p"))
}

/// Per-rung net CSV: `x, a, da, d2a` (real parts; coefficient nets from
/// positive kernels are real).
pub fn write_net_csv(net: &RegularizedNet, rung: usize, path: &Path) -> Result<()> {
    let e = &net.entries[rung];
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,a,da,d2a")?;
    for i in 0..net.grid.points {
        writeln!(
            w,
            "{},{},{},{}",
            net.grid.coord(i),
            e.values[i].re,
            e.deriv1[i].re,
            e.deriv2[i].re
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{regularize, CoefficientField};
    use crate::grid::{BoundaryMode, Grid};
    use crate::mollifier::{build_bump, PositiveScale};
    use crate::solver::{solve, DataNet, ForcingNet};

    #[test]
    fn trace_round_trip_is_byte_identical() {
        let grid = Grid::new_1d(64, 2.0, BoundaryMode::Periodic).with_horizon(0.25);
        let net = regularize(
            &CoefficientField::Constant { value: 1.0 },
            &build_bump(1.0, 1.0 / 64.0).unwrap(),
            &PositiveScale::power(1.0),
            &[0.25],
            &grid,
        )
        .unwrap();
        let g0 = DataNet {
            per_eps: vec![grid.sample(|x| (-x * x).exp())],
        };
        let g1 = DataNet::zero(1, &grid);
        let run = || {
            let traces = solve(&[&net], &ForcingNet::Zero, &g0, &g1, &grid).unwrap();
            let dir = std::env::temp_dir().join(format!("weakwave_test_{}", std::process::id()));
            std::fs::create_dir_all(&dir).unwrap();
            let p = dir.join(format!("{}.csv", rung_tag(0.25, &traces[0].kernel_id)));
            write_trace_csv(&traces[0], &p).unwrap();
            std::fs::read(&p).unwrap()
        };
        assert_eq!(run(), run());
    }
}
