use thiserror::Error;

/// CLI failures. Each prints as one JSON line on stderr and maps to an exit
/// status: 2 for invalid input, 3 for numerical failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{code}: {message}")]
    Validation { code: &'static str, message: String },
    #[error("{code}: {message}")]
    Numerical { code: &'static str, message: String },
}

impl CliError {
    pub fn validation(code: &'static str, message: impl Into<String>) -> Self {
        CliError::Validation {
            code,
            message: message.into(),
        }
    }

    pub fn numerical(code: &'static str, message: impl Into<String>) -> Self {
        CliError::Numerical {
            code,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Numerical { .. } => 3,
        }
    }

    /// `{"error":"<code>","kind":"validation|numerical","message":"…"}`
    pub fn to_json_line(&self) -> String {
        let (kind, code, message) = match self {
            CliError::Validation { code, message } => ("validation", code, message),
            CliError::Numerical { code, message } => ("numerical", code, message),
        };
        serde_json::json!({ "error": code, "kind": kind, "message": message }).to_string()
    }
}
