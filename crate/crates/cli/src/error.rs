use std::path::PathBuf;

/// Failures of the runner, each mapped to one exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("numeric failure: {0}")]
    Numeric(#[from] jtcran::Error),
    #[error("acceptance gate failed: {0}")]
    Gate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Read { .. } | CliError::Write { .. } => 1,
            CliError::Numeric(_) => 2,
            CliError::Gate(_) => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
