use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} outside supported range (2, 2^63)")]
    ModulusOutOfRange(u64),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("prime search bound {0} outside [2, 2^62)")]
    PrimeSearchOutOfRange(u64),
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("duplicate interpolation abscissa {0}")]
    DuplicateAbscissa(u64),
    #[error("grid of size {d} needs d < q = {q}")]
    GridTooLarge { d: u64, q: u64 },
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("index {index} outside universe [1, {n}]")]
    IndexOutOfRange { index: u64, n: u64 },
    #[error("delta must be -1 or +1, got {0}")]
    BadDelta(i64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown generator kind `{0}`")]
    UnknownGenerator(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error("claimed set has {claims} keys, cap is {cap}")]
    ProofTooLarge { claims: usize, cap: usize },
    #[error("stream exceeds length cap {cap}")]
    StreamTooLong { cap: u64 },
    #[error("g({arg}) = {value} exceeds declared bound {bound}")]
    GContract { arg: i64, value: u64, bound: u128 },
}

impl SchemeError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }
}
