use thiserror::Error;

/// Errors raised by the transform, approximation and correction routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("order must be at least 2, got {0}")]
    InvalidOrder(u32),

    #[error("operands have different orders ({0} vs {1})")]
    OrderMismatch(u32, u32),

    #[error("invalid a-adic interval: level {level}, index {index} (order {order})")]
    InvalidInterval { order: u32, level: u32, index: u64 },

    #[error("resolution error: level {needed} required, maximum is {max}")]
    Resolution { needed: u64, max: u32 },

    #[error("naive transform refused at level {level} (limit {limit})")]
    NaiveTooLarge { level: u32, limit: u32 },

    #[error("point cannot be represented exactly: {0}")]
    Precision(String),

    #[error("gamma must be nonzero")]
    ZeroGamma,

    #[error("eps must lie in (0, 1), got {0}")]
    EpsOutOfRange(f64),

    #[error("N0 must exceed 1, got {0}")]
    N0TooSmall(u64),

    #[error("input function has zero L1 norm")]
    ZeroNorm,

    #[error("infeasible: {reason}")]
    Infeasible { reason: String },

    #[error("no convergence after {steps} steps, residual {residual:e}")]
    NonConvergence { steps: usize, residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
