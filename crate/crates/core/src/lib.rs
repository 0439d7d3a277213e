//! Numerical laboratory for very weak solutions of the weakly hyperbolic wave
//! equation `u_tt - sum_i a_i(x) u_{x_i x_i} = f` with non-negative, possibly
//! distributional coefficients.
//!
//! The crate regularizes rough coefficients and data by mollification along an
//! epsilon-ladder, solves the regularized Cauchy problems with an explicit
//! leapfrog scheme, and quantifies the behaviour of the solution net:
//! Glaeser inequalities, symmetriser energy estimates, Sobolev norms,
//! moderateness fits, consistency with classical solutions, and sensitivity
//! to the choice of mollifier.
//!
//! Module map:
//! * [`mollifier`] — smoothing kernels (compact bumps, vanishing-moments
//!   kernels), positive scales, and convolution against functions and
//!   distribution descriptors.
//! * [`coefficients`] — coefficient fields, their regularized nets, and the
//!   Glaeser machinery.
//! * [`system`] — the first-order reduction matrices `A_k`, the symmetriser
//!   `Q`, their block-lifted derived systems, and identity verification.
//! * [`solver`] — leapfrog time stepping in 1 and 2 space dimensions plus the
//!   d'Alembert oracle.
//! * [`analysis`] — energies, Groenwall envelopes, Sobolev norms, asymptotic
//!   slope fits, consistency and mollifier-sensitivity studies.

pub mod analysis;
pub mod coefficients;
pub mod error;
pub mod fit;
pub mod fourier;
pub mod grid;
pub mod mollifier;
pub mod report;
pub mod solver;
pub mod system;

pub use error::{Error, Result};
pub use grid::{BoundaryMode, Grid};
pub use mollifier::{Mollifier, PositiveScale};

/// Complex scalar used throughout; real data lives in the real part.
pub type C64 = num_complex::Complex64;
