use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid instance parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("poset has {size} elements, above the cap of {cap}")]
    EnumerationCap { size: u128, cap: u64 },
    #[error("{size} exceeds the dense cap of {cap}")]
    DenseCap { size: usize, cap: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cache: {0}")]
    Cache(String),
    #[error("unknown check id {0}")]
    UnknownId(String),
    #[error("{0}")]
    NotApplicable(String),
    #[error("index {index} out of range: {what}")]
    OutOfRange { what: String, index: i64 },
    #[error("integer overflow during exact evaluation")]
    Overflow,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("sequence is not recurrent: {0}")]
    NotRecurrent(String),
    #[error("spectral decomposition: {0}")]
    Spectral(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("fixture {path}: {msg}")]
    Fixture { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
