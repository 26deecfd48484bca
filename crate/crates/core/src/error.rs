use thiserror::Error;

/// Errors raised by the numerical kernel, channel constructors and drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A documented precondition on the input does not hold.
    #[error("contract violated: {0}")]
    Contract(String),

    #[error("{routine} did not converge after {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// The channel fails trace preservation.
    #[error("invalid channel: trace-preservation residual {residual:.3e} exceeds {tolerance:.0e}")]
    InvalidChannel { residual: f64, tolerance: f64 },

    /// The exact mixed-unitary formula does not apply to this channel.
    #[error("exact formula not applicable: {0}")]
    Hypothesis(String),

    #[error("bound check failed: {0}")]
    BoundViolation(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
