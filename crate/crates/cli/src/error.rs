use thiserror::Error;

pub type Result<T> = std::result::Result<T, AppError>;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] envlab_core::Error),

    #[error("{0}")]
    Usage(String),

    #[error("empty grid: {0}")]
    EmptyGrid(String),

    #[error("malformed request: {0}")]
    BadRequest(String),

    #[error("session `{0}` not found")]
    SessionNotFound(String),

    #[error("{0}")]
    Conflict(String),

    #[error("session log: {0}")]
    Replay(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
