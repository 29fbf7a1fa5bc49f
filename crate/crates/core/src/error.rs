use thiserror::Error;

/// Errors raised by the lab's operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("dimension mismatch: system has dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("n = {n} exceeds the safe horizon of {limit} steps")]
    Horizon { n: u64, limit: u64 },

    #[error("operation budget exceeded: {required:.3e} inner steps requested, limit is {limit:.0e}")]
    Budget { required: f64, limit: f64 },

    #[error("polynomial span {span} exceeds the fft-binned limit {limit}; use an explicit interval with the grid method")]
    SpanTooLarge { span: u64, limit: u64 },

    #[error("degenerate reduction: {0}")]
    Degenerate(String),

    #[error("the zero polynomial has no leading coefficient")]
    ZeroPolynomial,
}

pub type Result<T> = std::result::Result<T, LabError>;
