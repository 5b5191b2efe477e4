use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("occupation {0:?} is not a state of this basis")]
    UnknownOccupation(Vec<usize>),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("joint state is not maximally correlated (largest off-pattern entry {0:e})")]
    NotMaxCorrelated(f64),

    #[error("invalid classical state spec: {0}")]
    InvalidSpec(String),

    #[error("unsupported particle number {0} (only n = 2 is supported)")]
    UnsupportedParticleNumber(usize),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
