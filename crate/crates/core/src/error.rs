use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("window too short: need at least {need} symbols, got {got}")]
    WindowTooShort { need: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded {
        what: String,
        needed: String,
        cap: String,
    },

    #[error("non-terminating expansion: {0}")]
    NonTerminating(String),

    #[error("automaton is not injective")]
    NotInjective,

    #[error("boundary case: {0}")]
    BoundaryCase(String),

    #[error("invalid tile set: {0}")]
    InvalidTiles(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unbounded disagreement: {0}")]
    UnboundedDisagreement(String),
}

impl Error {
    pub(crate) fn cap(what: impl Into<String>, needed: impl ToString, cap: impl ToString) -> Self {
        Error::CapExceeded {
            what: what.into(),
            needed: needed.to_string(),
            cap: cap.to_string(),
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
