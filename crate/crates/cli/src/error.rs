use std::fmt;

/// Failure of a CLI command, carrying its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Unreadable or malformed input, bad flag values (exit code 2).
    Input(String),
    /// Domain or statistical failure inside a computation (exit code 3).
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tailstat_core::Error> for CliError {
    fn from(e: tailstat_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}
