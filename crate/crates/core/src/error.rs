//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state is not normalized: |alpha_u|^2 + |alpha_d|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("operator is not Hermitian within tolerance {tol}")]
    NotHermitian { tol: f64 },

    #[error("operator is not unitary within tolerance {tol}")]
    NotUnitary { tol: f64 },

    #[error("operator is not a projector within tolerance {tol}")]
    NotProjector { tol: f64 },

    #[error("projector pair is not a complete orthogonal pair")]
    IncompletePair,

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("direction vector has zero length")]
    ZeroDirection,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown basis state name: {0:?}")]
    UnknownBasis(String),

    #[error("audio format error: {0}")]
    AudioFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
