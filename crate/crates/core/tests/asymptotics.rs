//! Ladder-scale asymptotic properties of the regularization machinery:
//! moderateness exponents, negligibility orders, mollifier-difference decay
//! and the Example-1 coefficient estimates.

use weakwave_core::coefficients::{regularize, CoefficientField, Example1Eval};
use weakwave_core::fit::{fit_vs_inverse_eps, log_log_fit};
use weakwave_core::grid::{BoundaryMode, Grid};
use weakwave_core::mollifier::{
    build_bump, build_bump_at, build_vanishing_moments, convolve, geometric_ladder,
    ConvolutionInput, Distribution, PositiveScale,
};
use weakwave_core::C64;

fn axis(points: usize, extent: f64) -> Grid {
    Grid::new_1d(points, extent, BoundaryMode::ZeroPadded)
}

/// Negligibility after smooth input: for compactly supported smooth `f` and
/// the vanishing-moments kernel, `||f * psi_omega - f||_inf` decays with
/// fitted order at least `p_max - 0.3` (here far beyond it).
#[test]
fn vanishing_moments_negligibility_order() {
    let psi = build_vanishing_moments(4, 1.0, 1.0 / 16.0).unwrap();
    let f = |x: f64| {
        let z = x / 1.5;
        if z.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - z * z)).exp()
        }
    };
    let out = axis(256, 2.5);
    let ladder = geometric_ladder(2, 9);
    let mut sups = Vec::new();
    for &eps in &ladder {
        let conv = convolve(&ConvolutionInput::Function(&f), &psi, eps, &out).unwrap();
        let sup = (0..out.points)
            .map(|i| (conv[i] - C64::new(f(out.coord(i)), 0.0)).norm())
            .fold(0.0f64, f64::max);
        sups.push(sup);
    }
    // restrict to rungs above the quadrature floor
    let (ls, vs): (Vec<f64>, Vec<f64>) = ladder
        .iter()
        .zip(&sups)
        .filter(|(_, &s)| s > 1e-13)
        .map(|(&e, &s)| (e, s))
        .unzip();
    assert!(ls.len() >= 4, "floor swallowed the ladder: {sups:?}");
    let fit = fit_vs_inverse_eps(&ls, &vs).unwrap();
    let order = -fit.slope;
    assert!(
        order >= 4.0 - 0.3,
        "negligibility order {order:.2} below p_max - 0.3 (sups {sups:?})"
    );
}

/// `(x^2 * psi_eps)(0) = eps^2 m2(psi)`; with certified moments the values
/// stay below `eps^4` across the ladder.
#[test]
fn polynomial_convolution_beyond_fourth_order() {
    let psi = build_vanishing_moments(4, 1.0, 1.0 / 16.0).unwrap();
    let f = |x: f64| x * x;
    let out = axis(64, 4.0);
    let i0 = (0..out.points)
        .find(|&i| out.coord(i).abs() < 1e-12)
        .unwrap();
    for &eps in &geometric_ladder(2, 9) {
        let conv = convolve(&ConvolutionInput::Function(&f), &psi, eps, &out).unwrap();
        let val = conv[i0].norm();
        assert!(
            val <= eps.powi(4),
            "eps = {eps}: |(x^2 * psi_eps)(0)| = {val:.3e} above eps^4"
        );
    }
}

/// Mollifier-difference convergence: the pairing of
/// `u * phi_{1,omega} - u * phi_{2,omega}` against a fixed smooth test
/// function tends to zero along the ladder (regression slope < 0). The
/// pairing is quadrated in the kernel variable so that arbitrarily narrow
/// kernels stay resolved.
#[test]
fn mollifier_difference_pairing_decays() {
    let phi1 = build_bump(1.0, 1.0 / 512.0).unwrap();
    let phi2 = build_bump_at(1.0, 0.5, 1.0 / 512.0).unwrap();
    // test function with theta'(0) != 0 so the first-order term shows
    let theta = |x: f64| {
        let z = x / 2.0;
        if z.abs() >= 1.0 {
            0.0
        } else {
            x * (-1.0 / (1.0 - z * z)).exp()
        }
    };
    let scale = PositiveScale::power(1.0);
    let ladder = geometric_ladder(2, 9);

    // point mass: <phi_{1,om} - phi_{2,om}, theta> = int (phi1-phi2)(s) theta(om s) ds
    let mut pairings = Vec::new();
    for &eps in &ladder {
        let om = scale.omega(eps);
        let quad = |m: &weakwave_core::Mollifier| -> f64 {
            let h = m.grid_spacing;
            let n = m.samples.len();
            m.samples
                .iter()
                .zip(m.abscissae())
                .enumerate()
                .map(|(j, (v, s))| {
                    let w = if j == 0 || j + 1 == n { 0.5 } else { 1.0 };
                    w * v.re * theta(om * s)
                })
                .sum::<f64>()
                * h
        };
        pairings.push((quad(&phi1) - quad(&phi2)).abs());
    }
    let fit = fit_vs_inverse_eps(&ladder, &pairings).unwrap();
    assert!(
        fit.slope < 0.0,
        "point-mass pairing does not decay: slope {:.2}, values {pairings:?}",
        fit.slope
    );

    // Heaviside: <H*phi_{1,om} - H*phi_{2,om}, theta>
    //          = om * int (Phi1 - Phi2)(s) theta(om s) ds
    let u = Distribution::Heaviside { location: 0.0 };
    let mut pairings = Vec::new();
    for &eps in &ladder {
        let om = scale.omega(eps);
        let r = phi1.support_radius.max(phi2.support_radius);
        let m = 4096usize;
        let h = 2.0 * r / m as f64;
        let mut acc = 0.0;
        for j in 0..=m {
            let s = -r + j as f64 * h;
            let w = if j == 0 || j == m { 0.5 } else { 1.0 };
            let d = (u.convolve_at(&phi1, 1.0, s) - u.convolve_at(&phi2, 1.0, s)).re;
            acc += w * d * theta(om * s);
        }
        pairings.push((om * acc * h).abs());
    }
    let fit = fit_vs_inverse_eps(&ladder, &pairings).unwrap();
    assert!(
        fit.slope < 0.0,
        "Heaviside pairing does not decay: slope {:.2}, values {pairings:?}",
        fit.slope
    );
}

/// Example-1 coefficient estimates: `||a_eps - a||_inf <= C omega` with
/// fitted order 1 for a kernel with nonzero first moment (symmetric kernels
/// do better), and derivative sup norms bounded uniformly in eps.
#[test]
fn example1_regularization_estimates() {
    let field = CoefficientField::Example1 {
        plateau_radius: 1.0,
        support_radius: 2.0,
    };
    let grid = axis(2048, 4.0);
    let ladder = geometric_ladder(2, 9);
    let ev = Example1Eval::new(1.0, 2.0).unwrap();

    // asymmetric positive bump: first moment 0.5
    let shifted = build_bump_at(1.0, 0.5, 1.0 / 512.0).unwrap();
    let net = regularize(&field, &shifted, &PositiveScale::power(1.0), &ladder, &grid).unwrap();
    let mut sup_diff = Vec::new();
    for e in &net.entries {
        let sup = (0..grid.points)
            .map(|i| (e.values[i].re - ev.a(grid.coord(i))).abs())
            .fold(0.0f64, f64::max);
        sup_diff.push(sup);
    }
    let fit = fit_vs_inverse_eps(&ladder, &sup_diff).unwrap();
    let order = -fit.slope;
    assert!(
        (order - 1.0).abs() <= 0.2,
        "||a_eps - a|| order {order:.3} not 1 +- 0.2 ({sup_diff:?})"
    );

    // positive symmetric bump: inequality holds a fortiori and the
    // derivative sups stay bounded by the unregularized ones
    let bump = build_bump(1.0, 1.0 / 512.0).unwrap();
    let net = regularize(&field, &bump, &PositiveScale::power(1.0), &ladder, &grid).unwrap();
    let a_sup = (0..grid.points)
        .map(|i| ev.a(grid.coord(i)))
        .fold(0.0f64, f64::max);
    let da_sup = (0..grid.points)
        .map(|i| ev.da(grid.coord(i)).abs())
        .fold(0.0f64, f64::max);
    let d2a_sup = (0..grid.points)
        .map(|i| ev.d2a(grid.coord(i)).abs())
        .fold(0.0f64, f64::max);
    for e in &net.entries {
        assert!(e.supnorms[0] <= a_sup * (1.0 + 1e-6) + 1e-12);
        assert!(e.supnorms[1] <= da_sup * (1.0 + 1e-6) + 1e-12);
        assert!(e.supnorms[2] <= d2a_sup * (1.0 + 5e-3) + 1e-12);
    }
}

/// Heaviside net under the paper scale `omega^{-2} = ln(1/eps)`: the
/// second-derivative sup norm reproduces `omega^{-2} ||phi'||_inf` exactly
/// through the analytic fast path.
#[test]
fn heaviside_sqrtlog_second_derivative_growth() {
    let bump = build_bump(1.0, 1.0 / 1024.0).unwrap();
    let dsup = bump.deriv1_sup();
    let grid = axis(1024, 4.0);
    let ladder = geometric_ladder(2, 9);
    let scale = PositiveScale::sqrtlog();
    let net = regularize(
        &CoefficientField::Heaviside { location: 0.0 },
        &bump,
        &scale,
        &ladder,
        &grid,
    )
    .unwrap();
    for e in &net.entries {
        let expect = dsup / (e.omega * e.omega);
        assert!(
            (e.supnorms[2] - expect).abs() <= 1e-9 * expect,
            "||H_eps''|| = {} vs omega^-2 ||phi'|| = {expect}",
            e.supnorms[2]
        );
    }
    // fits against omega^{-1} still see exponent 2 even on the narrow
    // logarithmic ladder
    let inv: Vec<f64> = net.entries.iter().map(|e| 1.0 / e.omega).collect();
    let norms: Vec<f64> = net.entries.iter().map(|e| e.supnorms[2]).collect();
    let fit = log_log_fit(&inv, &norms).unwrap();
    assert!((fit.slope - 2.0).abs() <= 0.05, "slope {:.3}", fit.slope);
}

/// Point-mass sums: non-negativity of the net and third-order kernel decay
/// of the sup norms.
#[test]
fn point_mass_sum_net() {
    let bump = build_bump(1.0, 1.0 / 512.0).unwrap();
    let grid = axis(1024, 4.0);
    let ladder = geometric_ladder(2, 7);
    let field = CoefficientField::PointMassSum {
        locations: vec![-1.0, 1.0],
        weights: vec![0.5, 2.0],
    };
    let net = regularize(&field, &bump, &PositiveScale::power(1.0), &ladder, &grid).unwrap();
    assert!(net.min_value() >= -1e-12);
    let fit = weakwave_core::coefficients::supnorm_exponent_fit(&net, 0).unwrap();
    // ||delta * phi_omega||_inf = omega^{-1} w ||phi||_inf: exponent 1
    assert!((fit.slope - 1.0).abs() <= 0.05, "slope {:.3}", fit.slope);
}
