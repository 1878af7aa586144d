use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Fewer than three budget cells had a nonzero error estimate.
    #[error("insufficient data for slope fit: {positive} positive cell(s), need 3 (largest usable T: {})",
        largest_usable.map_or_else(|| "none".to_string(), |t| t.to_string()))]
    InsufficientData {
        positive: usize,
        largest_usable: Option<u64>,
    },

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
