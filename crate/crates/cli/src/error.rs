use std::fmt;

use serde_json::json;

/// Error surfaced to the user as one JSON line on stderr.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { kind: "config", message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { kind: "io", message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        CliError { kind: "input", message: message.into() }
    }

    pub fn to_json_line(&self) -> String {
        json!({ "error": self.kind, "message": self.message }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<abc_shadow::Error> for CliError {
    fn from(e: abc_shadow::Error) -> Self {
        let kind = match e {
            abc_shadow::Error::Io(_) => "io",
            abc_shadow::Error::Csv(_) | abc_shadow::Error::Json(_) => "input",
            _ => "invalid",
        };
        CliError { kind, message: e.to_string() }
    }
}
