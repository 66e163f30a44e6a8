use thiserror::Error;

/// Errors raised by the geometric and algebraic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("singular matrix (condition estimate {condition:e})")]
    SingularMatrix { condition: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("not a Euclidean distance matrix: {0}")]
    InvalidMetric(String),

    #[error("vector is not unit length (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("degenerate simplex: {0}")]
    Degenerate(String),

    #[error("matrix has no Lorentz decomposition: {0}")]
    NotAdmissible(String),

    #[error("embedding height must be positive, got {0}")]
    NonPositiveHeight(f64),

    #[error("embedding height {height:e} exceeds {limit:e}")]
    HeightOutOfRange { height: f64, limit: f64 },

    #[error("vertex sets are not mutually polar (max off-diagonal {max_offdiag:e}, min diagonal {min_diag:e})")]
    NotPolar { max_offdiag: f64, min_diag: f64 },

    #[error("certificate check failed: {0}")]
    CertificateViolation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("generator produced no valid simplex after {attempts} attempts")]
    GenerationExhausted { attempts: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
