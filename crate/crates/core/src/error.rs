use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-domain input to a pure function.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Scenario or experiment configuration that cannot be run.
    #[error("configuration error: {0}")]
    Config(String),
    /// A caller broke an operation's precondition (e.g. an unavailable action).
    #[error("contract violation: {0}")]
    Contract(String),
    /// Numerical breakdown (all hypothesis weights vanished, singular matrices).
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
