//! Exit-code discipline: 0 success/holds, 1 usage, 2 input, 3 violated,
//! 4 inconclusive.

use std::fmt;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_VIOLATED: u8 = 3;
pub const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
        }
    }
}

impl From<renyicert_core::Error> for CliError {
    fn from(e: renyicert_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// serde_json errors already carry "at line L column C"; keep the context.
pub fn json_input_error(context: &str, e: serde_json::Error) -> CliError {
    if e.line() > 0 {
        CliError::Input(format!("{context}: {e}"))
    } else {
        CliError::Input(format!("{context}: {e} (line 1, column 1)"))
    }
}
