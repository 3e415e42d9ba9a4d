use thiserror::Error;

/// Errors raised by set construction, spectral analysis and counting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("value out of range: {0}")]
    Range(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("odd modulus required for spectral counting, got {0}")]
    Parity(usize),
    #[error("construction failed at stage {stage}, block {block}: {draws} draws rejected")]
    Construction { stage: usize, block: usize, draws: u32 },
    #[error("incomplete construction trace: {0}")]
    State(String),
    #[error("direct and spectral results disagree: {0}")]
    OracleMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
