//! Property tests for the structural invariants of the kernel and net
//! machinery.

use proptest::prelude::*;

use weakwave_core::coefficients::{
    glaeser_check, regularize, CoefficientField, GLAESER_FLOOR,
};
use weakwave_core::grid::{BoundaryMode, Grid};
use weakwave_core::mollifier::{build_bump, PositiveScale};
use weakwave_core::C64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Scaling preserves unit mass for every omega in the ladder range.
    #[test]
    fn scaled_kernel_mass_is_one(omega in 0.01f64..1.0) {
        let m = build_bump(1.0, 1.0 / 256.0).unwrap();
        let s = m.scale(omega).unwrap();
        prop_assert!((s.mass() - C64::new(1.0, 0.0)).norm() <= 1e-10);
        prop_assert!((s.moment_table[0] - C64::new(1.0, 0.0)).norm() <= 1e-10);
    }

    /// The Glaeser inequality holds on every net built from a random
    /// non-negative point-mass sum with a positive bump kernel.
    #[test]
    fn glaeser_holds_for_random_point_mass_sums(
        w1 in 0.1f64..2.0,
        w2 in 0.0f64..2.0,
        sep in 0.4f64..1.5,
    ) {
        let grid = Grid::new_1d(512, 4.0, BoundaryMode::ZeroPadded);
        let field = CoefficientField::PointMassSum {
            locations: vec![-sep, sep],
            weights: vec![w1, w2],
        };
        let net = regularize(
            &field,
            &build_bump(1.0, 1.0 / 512.0).unwrap(),
            &PositiveScale::power(1.0),
            &[0.25, 0.125, 0.0625, 0.03125],
            &grid,
        ).unwrap();
        prop_assert!(net.min_value() >= -1e-12);
        let rep = glaeser_check(&net, GLAESER_FLOOR, 1e-6).unwrap();
        for &rho in &rep.rho {
            prop_assert!(rho <= 1.0 + 1e-6, "rho = {rho}");
        }
    }

    /// Positivity preservation for Heaviside nets at random jump locations.
    #[test]
    fn heaviside_nets_stay_nonnegative(loc in -1.0f64..1.0) {
        let grid = Grid::new_1d(256, 4.0, BoundaryMode::ZeroPadded);
        let net = regularize(
            &CoefficientField::Heaviside { location: loc },
            &build_bump(1.0, 1.0 / 256.0).unwrap(),
            &PositiveScale::power(1.0),
            &[0.25, 0.125, 0.0625, 0.03125],
            &grid,
        ).unwrap();
        prop_assert!(net.min_value() >= -1e-12);
        // values bounded by the jump height
        for e in &net.entries {
            prop_assert!(e.supnorms[0] <= 1.0 + 1e-10);
        }
    }
}
