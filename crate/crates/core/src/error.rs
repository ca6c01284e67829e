use thiserror::Error;

/// Errors raised by the toolkit. The CLI maps each variant onto an exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// Shape, layout or dimension mismatch between operands.
    #[error("structural error: {0}")]
    Structural(String),

    /// Input fails a numerical validity condition (PSD, trace, normalization, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A dense construction would exceed the configured dimension cap.
    #[error("dimension {dim} exceeds cap {cap} (override with PTBOUND_DIM_CAP)")]
    DimensionCap { dim: usize, cap: usize },

    /// The requested scenario is outside what the routine supports.
    #[error("unsupported scenario: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
