use fracvar_core::FracError;
use thiserror::Error;

/// Failures that stop a study before its thresholds can be judged.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid study parameters: {0}")]
    Numeric(#[from] FracError),
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    ConfigParse {
        path: String,
        source: serde_json::Error,
    },
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write report: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot write report: {0}")]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
