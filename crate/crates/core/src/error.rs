use thiserror::Error;

/// Failure classes shared by every module; the CLI maps them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("numerical validation failed: {0}")]
    Numerical(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn size_cap<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::SizeCap(msg.into()))
}
