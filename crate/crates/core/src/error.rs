use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

/// Errors surfaced by the analysis pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}:{column}: syntax error: {message}")]
    Syntax {
        path: String,
        line: u32,
        column: u32,
        message: String,
    },
    #[error("{} file(s) failed to parse; first: {}", .0.len(), .0[0])]
    SyntaxErrors(Vec<Error>),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("profile error: {0}")]
    Profile(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("mapping error: {0}")]
    Mapping(String),
    #[error("format error at {path}: {message}")]
    Format { path: String, message: String },
    #[error("plan {0} is stale: {1}")]
    PlanStale(String, String),
    #[error("cannot rewrite plan {0}: {1}")]
    Rewrite(String, String),
    #[error("schema spec error: {0}")]
    Spec(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// A non-fatal finding recorded while processing a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<u32>,
    pub message: String,
}

impl Diagnostic {
    pub fn warning(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            path: None,
            line: None,
            column: None,
            message: message.into(),
        }
    }

    pub fn at(mut self, path: Option<&str>, line: u32, column: u32) -> Self {
        self.path = path.map(str::to_string);
        self.line = Some(line);
        self.column = Some(column);
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        match (&self.path, self.line, self.column) {
            (Some(p), Some(l), Some(c)) => write!(f, "{p}:{l}:{c}: {sev}: {}", self.message),
            (None, Some(l), Some(c)) => write!(f, "{l}:{c}: {sev}: {}", self.message),
            (Some(p), _, _) => write!(f, "{p}: {sev}: {}", self.message),
            _ => write!(f, "{sev}: {}", self.message),
        }
    }
}
