//! Batch front end for the `sqca` library: problem files in, JSON reports out.

pub mod commands;
pub mod json;
pub mod problem;
pub mod suites;

use serde_json::{json, Value};
use std::fmt;

/// Failure of a CLI command.  Input errors exit with 2, computation failures with 1.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input { kind: String, message: String },
    Computation(sqca::Error),
    /// A verification suite ran to completion and found failing checks.
    Failed(Value),
}

impl CliError {
    pub fn input(kind: &str, message: impl Into<String>) -> Self {
        CliError::Input { kind: kind.to_string(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => 2,
            CliError::Computation(_) | CliError::Failed(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Input { kind, message } => json!({"error": {"kind": kind, "message": message, "stage": "input"}}),
            CliError::Computation(e) => {
                json!({"error": {"kind": e.kind(), "message": e.to_string(), "stage": "computation"}})
            }
            CliError::Failed(report) => report.clone(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input { kind, message } => write!(f, "{kind}: {message}"),
            CliError::Computation(e) => write!(f, "{}: {e}", e.kind()),
            CliError::Failed(_) => write!(f, "verification failed"),
        }
    }
}

impl From<sqca::Error> for CliError {
    fn from(e: sqca::Error) -> Self {
        CliError::Computation(e)
    }
}

/// Core errors raised while building the problem are input errors.
pub(crate) fn input_err(e: sqca::Error) -> CliError {
    CliError::input(e.kind(), e.to_string())
}

pub type CliResult<T> = std::result::Result<T, CliError>;
