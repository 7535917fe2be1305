use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0} (supported: 1..=8)")]
    UnsupportedDimension(usize),

    #[error("inner product matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("matrix symbol is not invertible (|det A| = {absdet:e}, threshold {threshold:e}); composition operators are only well defined for invertible symbols")]
    Singular { absdet: f64, threshold: f64 },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("argument {t} outside the declared evaluation radius {radius}")]
    OutsideRadius { t: f64, radius: f64 },

    #[error("density vanishes at the origin (a_0 = 0)")]
    ZeroDensityPoint,

    #[error("polynomial degree {degree} exceeds the supported bound {max}")]
    DegreeOverflow { degree: usize, max: usize },

    #[error("function is not in the weighted L2 space: {0}")]
    NotInSpace(String),

    #[error("integrand is not integrable: {0}")]
    NonIntegrable(String),

    #[error("quadrature tolerance {tol:e} not met within budget (estimate {estimate:e}, error {error:e})")]
    ToleranceNotMet { tol: f64, estimate: f64, error: f64 },

    #[error("moment sequence too short: {0} entries, need at least 3")]
    SequenceTooShort(usize),

    #[error("coefficient system is not Hermitian at {0}")]
    NotHermitian(String),

    #[error("operator is unbounded; the bounded subnormality criterion does not apply")]
    Unbounded,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
