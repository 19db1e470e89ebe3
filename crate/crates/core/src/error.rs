use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported coefficient class: {0}")]
    UnsupportedClass(String),

    #[error("unsupported norm: {0}")]
    UnsupportedNorm(String),

    #[error("direction does not stabilize: {0}")]
    NonStabilizingDirection(String),

    #[error("numerical budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("unknown gallery case `{0}`")]
    UnknownCase(String),

    #[error("operator description: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
