//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A grid is too coarse for the requested construction or evaluation.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Kernel construction failed a certified property check.
    #[error("construction error: {0}")]
    Construction(String),

    /// Invalid or inconsistent configuration (mismatched grids, bad ladder,
    /// positivity requirements, unsatisfiable analysis requests).
    #[error("configuration error: {0}")]
    Config(String),

    /// Output domain cannot contain the smeared support of a convolution.
    #[error("domain error: {0}")]
    Domain(String),

    /// Time step violates the CFL stability bound.
    #[error("CFL violation: dt = {dt:.3e} exceeds stable limit {limit:.3e}")]
    Cfl { dt: f64, limit: f64 },

    /// Non-finite values appeared during time stepping.
    #[error("divergence at step {step}: non-finite field values")]
    Divergence { step: usize },

    /// A lifted system beyond the supported level was requested.
    #[error("unsupported lift level {0}: levels 0..=2 are implemented")]
    UnsupportedLevel(usize),

    /// An algebraic identity check failed beyond tolerance.
    #[error("identity failure ({name}): max relative error {max_rel:.3e} at indices {indices:?}")]
    Identity {
        name: String,
        max_rel: f64,
        indices: (usize, usize),
    },

    /// The Glaeser inequality was violated on a net (discretization bug).
    #[error("Glaeser violation: rho = {rho:.6} > 1 + {tol:.1e} at eps = {eps:.3e}")]
    Glaeser { rho: f64, tol: f64, eps: f64 },

    /// An asymptotic fit could not be performed.
    #[error("fit error: {0}")]
    Fit(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}
