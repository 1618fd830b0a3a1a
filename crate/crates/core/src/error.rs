use thiserror::Error;

/// Errors produced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("negative input: {0}")]
    NegativeInput(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("malformed generator matrices: {0}")]
    MalformedMatrix(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("coordinate {0} is not a dyadic rational with the required digit count")]
    NonDyadic(String),

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("empty point set")]
    EmptyPointSet,

    #[error("invalid Faber index j={j} k={k}")]
    InvalidIndex { j: i32, k: i64 },

    #[error("coefficients complete only up to level {available}, level {requested} required")]
    IncompleteCoefficients { requested: i32, available: i32 },

    #[error("evaluator failed: {0}")]
    Evaluator(String),

    #[error("test function has no closed-form integral")]
    NoClosedFormIntegral,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
