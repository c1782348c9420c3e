use serde::Serialize;

/// Failure category; decides the exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Config,
    Numerical,
    Io,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Io => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, thiserror::Error)]
#[error("{kind:?} error{}: {message}", path.as_ref().map(|p| format!(" at `{p}`")).unwrap_or_default())]
pub struct CliError {
    pub kind: ErrorKind,
    /// Dotted path of the offending configuration field.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn config(path: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Config,
            path: (!path.is_empty()).then(|| path.to_string()),
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Io, path: None, message: message.into() }
    }
}

impl From<jhj_core::Error> for CliError {
    fn from(e: jhj_core::Error) -> Self {
        let kind = if e.is_numerical() {
            ErrorKind::Numerical
        } else if matches!(e, jhj_core::Error::Io(_)) {
            ErrorKind::Io
        } else {
            ErrorKind::Config
        };
        CliError { kind, path: None, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}
