use glasner_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed flags, files or values.
    #[error("{0}")]
    Validation(String),
    /// The requested work exceeds the configured budget.
    #[error("{0}")]
    Budget(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io { .. } => 2,
            CliError::Budget(_) => 3,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    /// Prefixes a validation message with the offending location.
    pub fn at(self, location: &str) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{location}: {m}")),
            other => other,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if e.is_budget() {
            CliError::Budget(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
