use thiserror::Error;

/// Errors shared across the crate.
///
/// Domain outcomes that are expected results of an experiment (refutation not
/// found, SDP inconclusive, ...) are modeled as enum variants of the
/// respective result types, not as errors; `CoreError` is reserved for
/// violated preconditions and malformed data.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("variable count mismatch: {left} vs {right}")]
    NumVarsMismatch { left: usize, right: usize },

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: u32, right: u32 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration too large: estimated {estimate} items exceeds cap {cap}")]
    EnumerationCap { estimate: u128, cap: u128 },

    #[error("malformed coefficient: {0}")]
    CoeffParse(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidParameter(msg.into())
    }
}
