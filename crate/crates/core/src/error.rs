use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponent p = {0}")]
    InvalidExponent(f64),

    #[error("{sequence} weights become nonpositive at index {index}")]
    NonpositiveWeight { sequence: &'static str, index: usize },

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("out of domain: {0}")]
    OutOfDomain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("index {index} outside generated range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("ratio undefined for an identically zero input")]
    UndefinedRatio,
}

pub type Result<T> = std::result::Result<T, Error>;
