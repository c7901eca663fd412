use thiserror::Error;

/// Errors produced by the frontier-mapping library.
#[derive(Debug, Error)]
pub enum DibError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity exceeded: {what} = {value} (limit {limit})")]
    Capacity {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, DibError>;
