use std::path::PathBuf;

use crate::config::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Config { path: PathBuf, source: ConfigError },
    #[error("{}: line {line}: {message}", path.display())]
    Malformed { path: PathBuf, line: usize, message: String },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("solver failure: {0}")]
    Solver(#[from] nvsteady::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("every one of the {0} scan tuples failed")]
    ScanFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(_) | CliError::ScanFailed(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Config { .. } | CliError::Malformed { .. } | CliError::Argument(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
