use thiserror::Error;

use crate::certify::Attempt;
use crate::cnf::Assignment;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum FsosError {
    #[error("width mismatch: {left} vs {right} variables")]
    WidthMismatch { left: usize, right: usize },

    #[error("variable count {0} exceeds the supported ceiling of {max}", max = crate::fourier::MAX_VARS)]
    TooManyVariables(usize),

    #[error("point entry {value} at position {index} is not +1 or -1")]
    NotASignVector { index: usize, value: i64 },

    #[error("expected a point of length {expected}, got {got}")]
    PointLength { expected: usize, got: usize },

    #[error("value table has {got} entries, expected 2^{n} = {expected}")]
    IncompleteTable { n: usize, got: usize, expected: usize },

    #[error("n = {n} is above the exhaustive limit {limit}")]
    AboveExhaustiveLimit { n: usize, limit: usize },

    #[error("DIMACS line {line}: {message}")]
    Dimacs { line: usize, message: String },

    #[error("claimed bound L = {claimed} is impossible: witness assignment falsifies only {actual} clauses")]
    BoundRefused { claimed: i64, actual: i64, witness: Assignment },

    #[error("objective refused: {0}")]
    ObjectiveRefused(String),

    #[error("approximation error: {0}")]
    Approximation(String),

    #[error("degenerate linear program: {0}")]
    DegenerateLp(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("certificate format: {0}")]
    Format(String),

    #[error("certificate version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("formula digest mismatch: certificate binds {certificate}, formula hashes to {formula}")]
    DigestMismatch { certificate: String, formula: String },

    #[error("malformed decimal coefficient {0:?}")]
    MalformedDecimal(String),

    #[error("SDPA: {0}")]
    Sdpa(String),

    #[error("build failed after {} attempts: {reason}", attempts.len())]
    BuildFailed { reason: String, attempts: Vec<Attempt> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = FsosError> = std::result::Result<T, E>;
