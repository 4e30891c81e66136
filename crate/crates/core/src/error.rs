use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("XML parse error at {line}:{column}: {message}")]
    Parse {
        line: u32,
        column: u32,
        message: String,
    },

    #[error("empty input: the document has no content")]
    EmptyInput,

    #[error("node {node} is {found}, expected {expected}")]
    WrongKind {
        node: usize,
        found: &'static str,
        expected: &'static str,
    },

    #[error("no statistics for term {term:?} in node {node}")]
    MissingStatistics { term: String, node: usize },

    #[error("degree {value} lies outside [0, 1]")]
    DegreeOutOfRange { value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("incompatible contexts: {0}")]
    IncompatibleContexts(String),

    #[error("empty query")]
    EmptyQuery,

    #[error("unknown attribute {name:?}{}", suggestion_suffix(.suggestions))]
    UnknownAttribute {
        name: String,
        suggestions: Vec<String>,
    },

    #[error("degree {degree} for {name:?} must lie in (0, 1]")]
    QueryRange { name: String, degree: f64 },

    #[error("bad selector {0:?}")]
    BadSelector(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("CSV error: {0}")]
    Csv(String),

    #[error("corrupt index: {0}")]
    CorruptIndex(String),

    #[error("unsupported index version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

fn suggestion_suffix(suggestions: &[String]) -> String {
    if suggestions.is_empty() {
        String::new()
    } else {
        format!(" (did you mean: {}?)", suggestions.join(", "))
    }
}
