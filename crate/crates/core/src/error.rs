use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller handed in something outside an operation's domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A circuit could not be assembled for the requested register layout.
    #[error("circuit build error: {0}")]
    Build(String),

    /// Time evolution lost norm beyond tolerance.
    #[error("norm drift {drift:.3e} at step {step} exceeds {tolerance:.1e}")]
    NormDrift {
        step: usize,
        drift: f64,
        tolerance: f64,
    },

    /// An internal consistency check failed.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("malformed data: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
