//! Command line front end: subcommands over the toricfib library and the
//! reproduction driver.

pub mod commands;
pub mod data;
pub mod properties;
pub mod reproduce;

use serde_json::{json, Value};
use std::fmt;
use std::path::Path;

/// Error reported to the user as `{code, message, context}`.
#[derive(Debug, Clone)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub context: Value,
    /// 2 for domain errors, 1 for I/O and parse failures.
    pub exit: i32,
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> CliError {
        CliError {
            code: "io_error".into(),
            message: e.to_string(),
            context: json!({"path": path.display().to_string()}),
            exit: 1,
        }
    }

    pub fn parse(message: impl Into<String>) -> CliError {
        CliError { code: "parse_error".into(), message: message.into(), context: json!({}), exit: 1 }
    }

    pub fn domain(code: &str, message: impl Into<String>, context: Value) -> CliError {
        CliError { code: code.into(), message: message.into(), context, exit: 2 }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": {"code": self.code, "message": self.message, "context": self.context}})
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<toricfib::Error> for CliError {
    fn from(e: toricfib::Error) -> CliError {
        let exit = if matches!(e, toricfib::Error::Parse(_)) { 1 } else { 2 };
        CliError { code: e.code().into(), message: e.to_string(), context: e.context(), exit }
    }
}

/// Pretty JSON with sorted keys (serde_json maps are ordered by key).
pub fn canonical_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}
