use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] kchase::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("fit refused: {0}")]
    FitRefused(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl HarnessError {
    /// 2 for anything the user can fix in the input, 3 when a state space
    /// is over budget, 1 for I/O trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(kchase::Error::Capacity { .. }) => 3,
            HarnessError::Io { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn config_error<T>(msg: impl Into<String>) -> Result<T> {
    Err(HarnessError::Config(msg.into()))
}
