use std::path::PathBuf;

/// Process exit status for a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    PropertyViolation = 1,
    ConfigError = 2,
    SolverFailure = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("solver failure: {0}")]
    Solver(#[from] hillspec_core::Error),

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Serialize(String),
}

impl HarnessError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            HarnessError::Config(_) | HarnessError::ReadConfig { .. } => ExitStatus::ConfigError,
            HarnessError::Solver(_) | HarnessError::Write { .. } | HarnessError::Serialize(_) => {
                ExitStatus::SolverFailure
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
