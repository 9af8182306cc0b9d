//! Front-end error categories and their exit codes.

use serde_json::json;

/// Failure of a run, classified by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable or malformed configuration (exit 2).
    Parse(String),
    /// A value violates a precondition (exit 3).
    Validation(String),
    /// A numerical or accuracy failure during computation (exit 4).
    Numerical(String),
    /// The result could not be written (exit 1).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Parse(_) => "parse",
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Parse(m) | CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }

    /// Structured report written to standard error.
    pub fn report(&self) -> String {
        json!({ "error": { "kind": self.kind(), "exit_code": self.exit_code(), "message": self.message() } }).to_string()
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<winding_rmt::Error> for CliError {
    fn from(e: winding_rmt::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        let v: CliError = winding_rmt::Error::Validation("x".into()).into();
        assert_eq!(v.exit_code(), 3);
        let n: CliError = winding_rmt::Error::Sampling("y".into()).into();
        assert_eq!(n.exit_code(), 4);
        let report: serde_json::Value = serde_json::from_str(&n.report()).unwrap();
        assert_eq!(report["error"]["kind"], "numerical");
    }
}
