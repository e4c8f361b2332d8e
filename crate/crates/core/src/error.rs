use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("state has non-finite amplitudes")]
    NonFinite,

    #[error("empty state list")]
    Empty,

    #[error("invalid phase label {0}, expected 0..=3")]
    InvalidLabel(u8),

    #[error("invalid participant count {0}: {1}")]
    InvalidParticipants(usize, &'static str),

    #[error("invalid reflection phase {0}: {1}")]
    InvalidOmega(f64, &'static str),

    #[error("initial state index {index} out of range 1..={max}")]
    InvalidStateIndex { index: usize, max: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("verification gate failed: {0}")]
    Verification(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Verification(_) => 2,
            Error::ResourceGuard(_) => 3,
            _ => 1,
        }
    }
}

pub(crate) fn check_dims(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}
