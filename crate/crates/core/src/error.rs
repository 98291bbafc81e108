use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix order must be positive")]
    EmptyMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular to working precision (pivot {pivot:e} at step {step})")]
    SingularMatrix { step: usize, pivot: f64 },

    #[error("preconditioner is not a certified H-matrix: {0}")]
    PreconditionerNotH(String),

    #[error("start vector violates |A-P|e <= M(P)s0 in row {row} (slack {slack:e})")]
    InvalidStartVector { row: usize, slack: f64 },

    #[error("not a Sassenfeld pair: {0}")]
    NotSassenfeld(String),

    #[error("zero diagonal entry in row {0}")]
    ZeroDiagonal(usize),

    #[error("bound unavailable: Sassenfeld index {mu} is not below 1")]
    BoundUnavailable { mu: f64 },

    #[error("splitting is not contractive: Sassenfeld index {mu} is not below 1")]
    NotContractive { mu: f64 },

    #[error("dominance certificate fails in row {row} (margin {margin:e})")]
    CertificateDegenerate { row: usize, margin: f64 },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
