//! Document parsing, command dispatch and report rendering behind the
//! `torfan` binary. Kept as a library so tests can run commands in-process.

pub mod commands;
pub mod document;
pub mod report;

use std::fmt;

pub use commands::{run, Command, Options};
pub use report::{render, Format, Report};

/// Exit status 2 for anything wrong with the input file itself, 1 for a
/// failure of the mathematics on valid input.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Io(String),
    Parse(String),
    Validation(String),
    Domain(torfan_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Io(_) => "IoError",
            CliError::Parse(_) => "ParseError",
            CliError::Validation(_) => "ValidationError",
            CliError::Domain(e) => e.name(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) | CliError::Parse(m) | CliError::Validation(m) => f.write_str(m),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<torfan_core::Error> for CliError {
    fn from(e: torfan_core::Error) -> Self {
        CliError::Domain(e)
    }
}
