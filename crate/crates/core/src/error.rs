use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Evaluation left the finite doubles; callers treat the orbit as escaped.
    #[error("evaluation overflowed to a non-finite value")]
    Overflow,
    #[error("composite degree {degree} exceeds cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// The answer cannot be decided at this window/budget (e.g. a set touches
    /// the window edge). Maps to CLI exit code 2.
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("no repelling fixed point among generators")]
    Seed,
    #[error("classification error: {0}")]
    Classification(String),
    #[error("unsupported sequence kind: {0}")]
    UnsupportedKind(String),
    #[error("orbit contradicts classification: {0}")]
    Contradiction(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
