use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),

    #[error("field order {p}^{m} exceeds the cap of {cap}")]
    FieldTooLarge { p: u32, m: u32, cap: u32 },

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("multiplicative inverse of zero")]
    InverseOfZero,

    #[error("symbol {symbol} is out of range for a field of order {q}")]
    SymbolOutOfRange { symbol: u32, q: u32 },

    #[error("field of order {0} is not GF(d^2) with prime d")]
    NotPrimeSquare(u32),

    #[error("{what} requires {needed} enumerations, above the cap of {cap}")]
    CapExceeded { what: &'static str, needed: u128, cap: u128 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("generator matrix has rank {rank}, expected {k}")]
    RankDeficient { rank: usize, k: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid support {0:?}")]
    BadSupport(Vec<usize>),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
