use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPositiveSemidefinite { min_eig: f64 },

    #[error("gauge matrix is singular or ill-conditioned (condition number {condition:e})")]
    SingularGauge { condition: f64 },

    #[error("terms do not reconstruct the matrix (residual {residual:e})")]
    InconsistentDecomposition { residual: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}

pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}
