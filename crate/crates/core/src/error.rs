use thiserror::Error;

/// Errors produced by tensor construction, evaluation and problem ingestion.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("shape mismatch: ({order_a}, {dim_a}) vs ({order_b}, {dim_b})")]
    ShapeMismatch {
        order_a: usize,
        dim_a: usize,
        order_b: usize,
        dim_b: usize,
    },

    #[error("invalid tensor shape: {0}")]
    InvalidShape(String),

    #[error("index {index:?} out of range for dimension {dim}")]
    IndexOutOfRange { index: Vec<usize>, dim: usize },

    #[error("duplicate entry at index {0:?}")]
    DuplicateEntry(Vec<usize>),

    #[error("dense materialization needs {0} entries, above the 1e6 limit")]
    TooLarge(u128),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("the exact min residual is nonsmooth; use FB or a positive smoothing parameter")]
    Nonsmooth,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{field}: {message}")]
    Schema { field: String, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
