use thiserror::Error;

use crate::tensor::SpaceTag;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid presentation: {}", .0.join("; "))]
    InvalidPresentation(Vec<String>),
    #[error("expected an element of {expected}, found {found}")]
    SpaceMismatch { expected: SpaceTag, found: SpaceTag },
    #[error("{to} is not a quotient of {from}")]
    NotAQuotient { from: SpaceTag, to: SpaceTag },
    #[error("tensor length mismatch: {0}")]
    LengthMismatch(String),
    #[error("order {requested} exceeds the available order {order}")]
    OrderExceeded { requested: usize, order: usize },
    #[error("not flat: T_{order} D({variable}) is not in K^{}", order + 1)]
    NotFlat { variable: String, order: usize },
    #[error("not O_X-linear: {0}")]
    NotLinear(String),
    #[error("presentations do not match")]
    PresentationMismatch,
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
