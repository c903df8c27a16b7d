use inflap_core::{Error, SolveReport};
use thiserror::Error;

/// Process exit status for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    AcceptanceFail = 1,
    ConfigError = 2,
    NumericalError = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("numerical error: {message}")]
    Numerical {
        message: String,
        partial: Option<Box<SolveReport>>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Config(_) => ExitStatus::ConfigError,
            CliError::Numerical { .. } | CliError::Io(_) => ExitStatus::NumericalError,
        }
    }

    pub fn config(context: &str, err: impl std::fmt::Display) -> Self {
        let msg = err.to_string();
        let msg = msg.strip_prefix("configuration error: ").unwrap_or(&msg);
        CliError::Config(format!("{context}: {msg}"))
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::Config(msg) | Error::Query(msg) => CliError::Config(msg),
            e @ Error::NoDeadCore { .. } => CliError::Config(e.to_string()),
            err @ Error::NonConvergence { .. } => {
                let message = err.to_string();
                let Error::NonConvergence { partial, .. } = err else {
                    unreachable!()
                };
                CliError::Numerical {
                    message,
                    partial: Some(partial),
                }
            }
            other => CliError::Numerical {
                message: other.to_string(),
                partial: None,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}
