use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("unsupported transform length {0} (lengths must be 2^a or 3*2^a)")]
    UnsupportedSize(usize),
    #[error("polynomial of length {len} does not fit a transform of length {size}")]
    DegreeTooLarge { len: usize, size: usize },
    #[error("spectrum kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("requested order {requested} exceeds available order {available}")]
    OrderTooLarge { requested: usize, available: usize },
    #[error("series is not invertible: constant term is zero")]
    NotInvertible,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid block plan: {0}")]
    InvalidPlan(String),
    #[error("missing block spectrum {index} for series '{label}'")]
    MissingSpectra { label: String, index: usize },
    #[error("series '{label}' has {available} coefficients, {needed} needed")]
    SeriesTooShort { label: String, needed: usize, available: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, SeriesError>;
