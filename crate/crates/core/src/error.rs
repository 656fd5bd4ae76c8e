use thiserror::Error;

/// Errors raised across the workbench. Each variant carries a message prefix
/// that the CLI forwards verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("alphabet error: {0}")]
    Alphabet(String),
    #[error("format error: line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("decode error: {0}")]
    Decode(String),
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("oracle error: {0}")]
    Oracle(String),
    #[error("promise violation: {0}")]
    PromiseViolation(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("audit error: {0}")]
    Audit(String),
    #[error("equivalence error: {0}")]
    Equivalence(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format { line, msg: msg.into() }
    }

    /// Short machine-readable kind, used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::Alphabet(_) => "alphabet",
            Error::Format { .. } => "format",
            Error::Decode(_) => "decode",
            Error::InvalidMachine(_) => "invalid-machine",
            Error::Oracle(_) => "oracle",
            Error::PromiseViolation(_) => "promise-violation",
            Error::Resource(_) => "resource",
            Error::Unsupported(_) => "unsupported",
            Error::Audit(_) => "audit",
            Error::Equivalence(_) => "equivalence",
            Error::Overflow(_) => "overflow",
        }
    }
}
