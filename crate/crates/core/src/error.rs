use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NonHermitian(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not X-shaped (off-X entry of magnitude {0:e})")]
    NotXState(f64),

    #[error("X state with |rho_14| = {0:e} is outside the supported subclass")]
    UnsupportedXState(f64),

    #[error("optimizer did not converge within {iterations} iterations (simplex spread {spread:e})")]
    OptimizerDiverged { iterations: usize, spread: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("step too large: predictor/corrector mismatch {mismatch:e} at t = {t}")]
    StepTooLarge { t: f64, mismatch: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
