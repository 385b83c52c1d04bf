use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Unreadable, malformed or invalid input.
    Input,
    /// A numerical routine broke down on valid input.
    Numerical,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Input,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Numerical,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Input => 2,
            ErrorKind::Numerical => 3,
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match self.kind {
            ErrorKind::Input => "input",
            ErrorKind::Numerical => "numerical",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "error": {
                "kind": self.kind_str(),
                "message": self.message,
                "exit_code": self.exit_code(),
            }
        })
    }
}

impl From<lebesgue_core::Error> for CliError {
    fn from(e: lebesgue_core::Error) -> Self {
        if e.is_input_error() {
            CliError::input(e.to_string())
        } else {
            CliError::numerical(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
