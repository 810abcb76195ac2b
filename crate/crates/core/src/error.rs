use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{op} did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence {
        op: &'static str,
        sweeps: usize,
        residual: f64,
    },

    #[error("decomposition infeasible: reconstruction residual {residual:e} exceeds {limit:e}")]
    InfeasibleDecomposition { residual: f64, limit: f64 },

    #[error("i/o failure on {path}: {message}")]
    Io { path: String, message: String },

    #[error("finite-dimensional suite trial {trial} produced a violation: {detail}")]
    SuiteViolation { trial: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
