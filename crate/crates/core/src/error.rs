use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-unit constant term, series is not invertible")]
    NotInvertible,
    #[error("negative exponent {0} needs an explicit expansion region")]
    MissingRegion(i64),
    #[error("variable {0:?} is not part of this expression")]
    UnknownVariable(String),
    #[error("variable lists differ: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("requested coefficient lies beyond the retained caps: {0}")]
    BeyondCap(String),
    #[error("invalid region: {0}")]
    BadRegion(String),
    #[error("invalid tensor legs: {0}")]
    BadLegs(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("matching size {k} out of range for n = {n}")]
    MatchingOutOfRange { n: usize, k: usize },
    #[error("inconsistent normalization system at order {0}")]
    InconsistentSystem(usize),
    #[error("kernel has a non-vanishing h^{0} part")]
    NonVanishingLowOrder(usize),
    #[error("level-0 mode is excluded from H(C)*")]
    ZeroModeExcluded,
    #[error("non-diagonal input: {0}")]
    NonDiagonal(String),
    #[error("invalid zero-mode character: {0}")]
    BadCharacter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
