//! Error handling and exit-code policy.
//!
//! Two failure classes reach the user: problems with what they supplied
//! (missing files, malformed rows, parameters outside their domains) exit
//! with code 2, while computational degeneracies on valid input (an
//! unsolvable restriction-time rule, a zero-variance difference) exit with
//! code 3. Success is 0; nothing panics on malformed input.

use std::fmt;

/// A CLI failure, classified for the exit code.
#[derive(Debug)]
pub enum CliError {
    /// The user's input was unusable (exit code 2).
    Input(String),
    /// Valid input led to a degenerate computation (exit code 3).
    Compute(String),
}

impl CliError {
    pub fn input(message: impl Into<String>) -> CliError {
        CliError::Input(message.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Compute(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Compute(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<rmtl::Error> for CliError {
    fn from(err: rmtl::Error) -> CliError {
        if err.is_input_error() {
            CliError::Input(err.to_string())
        } else {
            CliError::Compute(err.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> CliError {
        CliError::Input(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
