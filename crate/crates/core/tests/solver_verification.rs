//! Solver-level verification: convergence order, degenerate-region
//! behaviour, complex data end-to-end, and moderateness of Heaviside runs
//! under the logarithmic scale.

use weakwave_core::analysis::{moderateness_fit, ModerateVerdict};
use weakwave_core::coefficients::{regularize, CoefficientField};
use weakwave_core::grid::{BoundaryMode, Grid};
use weakwave_core::mollifier::{
    build_bump, build_vanishing_moments_spec, geometric_ladder, PositiveScale,
    VanishingMomentsSpec,
};
use weakwave_core::solver::{
    dalembert_oracle, solve, DataDescriptor, DataField, DataNet, ForcingNet,
};
use weakwave_core::C64;

fn l2_error_vs_dalembert(points: usize) -> f64 {
    let grid = Grid::new_1d(points, 8.0, BoundaryMode::Periodic).with_horizon(1.0);
    let net = regularize(
        &CoefficientField::Constant { value: 1.0 },
        &build_bump(1.0, 1.0 / 128.0).unwrap(),
        &PositiveScale::power(1.0),
        &[0.25],
        &grid,
    )
    .unwrap();
    let g0 = DataNet {
        per_eps: vec![grid.sample(|x| (-x * x).exp())],
    };
    let g1 = DataNet::zero(1, &grid);
    let traces = solve(&[&net], &ForcingNet::Zero, &g0, &g1, &grid).unwrap();
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
    (err2 / ref2).sqrt()
}

/// Observed convergence order from a triple of refined grids: 2 +- 0.3.
#[test]
fn leapfrog_second_order_by_refinement() {
    let e0 = l2_error_vs_dalembert(256);
    let e1 = l2_error_vs_dalembert(512);
    let e2 = l2_error_vs_dalembert(1024);
    let p01 = (e0 / e1).log2();
    let p12 = (e1 / e2).log2();
    assert!(
        (p01 - 2.0).abs() <= 0.3 && (p12 - 2.0).abs() <= 0.3,
        "orders {p01:.2}, {p12:.2} (errors {e0:.2e}, {e1:.2e}, {e2:.2e})"
    );
}

/// Where `a_eps` vanishes identically (left of the smeared Heaviside jump)
/// and `f = 0`, the solution is exactly `g0 + t g1`.
#[test]
fn degenerate_region_inert() {
    let grid = Grid::new_1d(2048, 6.0, BoundaryMode::ZeroPadded).with_horizon(1.0);
    let bump = build_bump(1.0, 1.0 / 512.0).unwrap();
    let ladder = [0.25, 0.125];
    let net = regularize(
        &CoefficientField::Heaviside { location: 0.0 },
        &bump,
        &PositiveScale::power(1.0),
        &ladder,
        &grid,
    )
    .unwrap();
    // data supported left of the jump, inside the degenerate region
    let g0d = DataDescriptor::one_d(DataField::Bump {
        center: -3.0,
        radius: 1.0,
        amplitude: 1.0,
    });
    let g0 = DataNet::exact(&g0d, ladder.len(), &grid).unwrap();
    let g1v = grid.sample(|x| {
        let z: f64 = (x + 3.0) / 1.5;
        if z.abs() >= 1.0 {
            0.0
        } else {
            0.3 * (-1.0 / (1.0 - z * z)).exp()
        }
    });
    let g1 = DataNet {
        per_eps: vec![g1v.clone(); ladder.len()],
    };
    let traces = solve(&[&net], &ForcingNet::Zero, &g0, &g1, &grid).unwrap();
    for (idx, tr) in traces.iter().enumerate() {
        let omega = net.entries[idx].omega;
        // one kernel width of margin inside the degenerate region
        let margin = -omega * bump.support_radius - grid.spacing();
        let t_end = *tr.times.last().unwrap();
        let u = tr.final_snapshot();
        for i in 0..grid.points {
            let x = grid.coord(i);
            if x < margin {
                let expect = g0.per_eps[idx][i].re + t_end * g1v[i].re;
                assert!(
                    (u[i].re - expect).abs() <= 1e-12,
                    "eps = {}: inertness violated at x = {x}: {} vs {expect}",
                    tr.eps,
                    u[i].re
                );
            }
        }
    }
}

/// Complex-valued data (frequency-shifted vanishing-moments kernel) runs
/// end-to-end; modulus norms behave like the real case.
#[test]
fn complex_data_end_to_end() {
    let grid = Grid::new_1d(1024, 6.0, BoundaryMode::Periodic).with_horizon(0.5);
    let bump = build_bump(1.0, 1.0 / 256.0).unwrap();
    let ladder = geometric_ladder(2, 5);
    let net = regularize(
        &CoefficientField::Heaviside { location: 0.0 },
        &bump,
        &PositiveScale::sqrtlog(),
        &ladder,
        &grid,
    )
    .unwrap();
    let psi = build_vanishing_moments_spec(
        &VanishingMomentsSpec::new(4, 1.0, 1.0 / 16.0).with_freq_shift(0.4),
    )
    .unwrap();
    let g0d = DataDescriptor::one_d(DataField::Bump {
        center: 0.0,
        radius: 1.0,
        amplitude: 1.0,
    });
    let g0 = DataNet::from_descriptor(&g0d, &psi, &ladder, &grid).unwrap();
    // the regularized data really is complex
    assert!(g0.per_eps[0].iter().any(|v| v.im.abs() > 1e-6));
    let g1 = DataNet::zero(ladder.len(), &grid);
    let traces = solve(&[&net], &ForcingNet::Zero, &g0, &g1, &grid).unwrap();
    for tr in &traces {
        let n = grid.l2_norm(tr.final_snapshot());
        assert!(n.is_finite() && n > 0.0);
        assert!(tr.final_snapshot().iter().any(|v| v.im.abs() > 1e-9));
    }
}

/// Heaviside coefficient under `omega^{-2} = ln(1/eps)` with smooth data:
/// the moderateness slope of `sup_t ||u_eps||_{L^2}` stays below the
/// `2 T ||phi'||_inf + 0.5` budget of the energy estimate.
#[test]
fn heaviside_sqrtlog_moderate() {
    let grid = Grid::new_1d(2048, 4.0, BoundaryMode::ZeroPadded).with_horizon(1.0);
    let bump = build_bump(1.0, 1.0 / 1024.0).unwrap();
    let ladder = geometric_ladder(2, 9);
    let net = regularize(
        &CoefficientField::Heaviside { location: 0.0 },
        &bump,
        &PositiveScale::sqrtlog(),
        &ladder,
        &grid,
    )
    .unwrap();
    let g0d = DataDescriptor::one_d(DataField::Bump {
        center: 0.0,
        radius: 1.0,
        amplitude: 1.0,
    });
    let g0 = DataNet::exact(&g0d, ladder.len(), &grid).unwrap();
    let g1 = DataNet::zero(ladder.len(), &grid);
    let traces = solve(&[&net], &ForcingNet::Zero, &g0, &g1, &grid).unwrap();
    let sups: Vec<f64> = traces.iter().map(|t| t.sup_l2()).collect();
    let budget = 2.0 * grid.horizon * bump.deriv1_sup() + 0.5;
    let fit = moderateness_fit(&ladder, &sups, "sup_t L2", budget, 3.0).unwrap();
    assert!(
        fit.verdict == ModerateVerdict::Moderate
            || fit.verdict == ModerateVerdict::NegligibleTrend,
        "verdict {:?} slope {:.3} budget {budget:.3}",
        fit.verdict,
        fit.fit.slope
    );
}

/// Waves pass into the degenerate half-line without blow-up: the sup norm
/// over the sweep stays bounded by a small multiple of the data norm.
#[test]
fn heaviside_transmission_bounded() {
    let grid = Grid::new_1d(2048, 4.0, BoundaryMode::ZeroPadded).with_horizon(1.0);
    let bump = build_bump(1.0, 1.0 / 512.0).unwrap();
    let ladder = geometric_ladder(2, 7);
    let net = regularize(
        &CoefficientField::Heaviside { location: 0.0 },
        &bump,
        &PositiveScale::sqrtlog(),
        &ladder,
        &grid,
    )
    .unwrap();
    let g0d = DataDescriptor::one_d(DataField::Bump {
        center: 1.0,
        radius: 0.5,
        amplitude: 1.0,
    });
    let g0 = DataNet::exact(&g0d, ladder.len(), &grid).unwrap();
    let g1 = DataNet::zero(ladder.len(), &grid);
    let traces = solve(&[&net], &ForcingNet::Zero, &g0, &g1, &grid).unwrap();
    let d0 = grid.l2_norm(&g0.per_eps[0]);
    for tr in &traces {
        assert!(tr.sup_l2() <= 10.0 * d0);
    }
}

/// A sanity anchor for the complex path: purely real data stays purely real.
#[test]
fn real_data_stays_real() {
    let grid = Grid::new_1d(512, 4.0, BoundaryMode::Periodic).with_horizon(0.5);
    let net = regularize(
        &CoefficientField::Constant { value: 1.0 },
        &build_bump(1.0, 1.0 / 128.0).unwrap(),
        &PositiveScale::power(1.0),
        &[0.25],
        &grid,
    )
    .unwrap();
    let g0 = DataNet {
        per_eps: vec![grid.sample(|x| (-x * x).exp())],
    };
    let g1 = DataNet::zero(1, &grid);
    let traces = solve(&[&net], &ForcingNet::Zero, &g0, &g1, &grid).unwrap();
    assert!(traces[0]
        .snapshots
        .iter()
        .all(|s| s.iter().all(|v: &C64| v.im == 0.0)));
}
