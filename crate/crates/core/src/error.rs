use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not transposition-symmetric (residual {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix is not real symmetric (residual {0:.3e})")]
    NotRealSymmetric(f64),

    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is numerically singular (smallest |eigenvalue| {0:.3e})")]
    SingularMatrix(f64),

    #[error("symplectic constraint violated (residual {0:.3e})")]
    ConstraintViolation(f64),

    #[error("point is outside the Siegel disc (operator norm {0})")]
    NotInDisc(f64),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("polar factorization failed (residual {0:.3e})")]
    FactorizationFailure(f64),

    #[error("alpha must be positive, got {0}")]
    InvalidAlpha(f64),

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("Fock basis too large: dimension {dim}, cutoff {cutoff}")]
    BasisTooLarge { dim: usize, cutoff: usize },

    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("mode {mode} out of range for dimension {dim}")]
    ModeOutOfRange { mode: usize, dim: usize },

    #[error("invalid input: {0}")]
    Input(String),
}
