use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cone is not pointed (it contains a line)")]
    NotPointed,
    #[error("cone is not full-dimensional (generators do not span the space)")]
    NotFullDimensional,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("validation failed ({invariant}): {detail}")]
    Validation {
        invariant: &'static str,
        detail: String,
    },
    #[error("malformed linear program: {0}")]
    MalformedProgram(String),
    #[error("degenerate state space: {0}")]
    Degenerate(String),
    #[error("symmetry group does not act transitively on pure states")]
    NotTransitive,
    #[error("action is not closed: {0}")]
    ActionNotClosed(String),
    #[error("vertices {0} and {1} are not perfectly distinguishable")]
    NotDistinguishable(usize, usize),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("improper effect: {0}")]
    ImproperEffect(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn validation(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation {
            invariant,
            detail: detail.into(),
        }
    }
}
