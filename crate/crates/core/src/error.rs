use thiserror::Error;

/// Errors produced by the solvers and builders in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Population leaked into the top Fock levels; `n_max` should be raised.
    #[error(
        "Fock truncation violated at t = {t}: population {population:.3e} near n_max = {n_max}"
    )]
    Truncation {
        n_max: usize,
        t: f64,
        population: f64,
    },

    #[error("no convergence by t = {t}: residual {residual:.3e} above tolerance {tolerance:.3e}")]
    NonConvergence {
        t: f64,
        residual: f64,
        tolerance: f64,
    },

    /// A single trajectory step lost too much norm to resolve the jump time.
    #[error("time step too large at t = {t}: relative norm drop {drop:.3} in one step")]
    StepTooLarge { t: f64, drop: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
