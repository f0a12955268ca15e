//! CLI error classification: input problems exit with 2, numerical failures
//! surfaced from the analysis library with 3.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, unparsable, or inconsistent user input.
    Input(String),
    /// Computation rejected or failed inside the analysis library.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl From<whirl_core::Error> for CliError {
    fn from(err: whirl_core::Error) -> Self {
        CliError::Numerical(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Input(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
