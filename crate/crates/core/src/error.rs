use thiserror::Error;

/// Errors produced by constructors, document decoding and lookups.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("space mismatch: expected {expected} points, found {found}")]
    SpaceMismatch { expected: usize, found: usize },

    #[error("point {point} is outside a space of {n} points")]
    PointOutOfRange { point: usize, n: usize },

    #[error("unknown index `{0}`")]
    UnknownIndex(String),

    #[error("set {0} is not open in the topology")]
    NotOpen(String),

    #[error("element `{0}` is not a positive")]
    NotPositive(String),

    #[error("{what} = {value} is out of range ({range})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        range: &'static str,
    },

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("unknown separation mode `{0}`")]
    UnknownMode(String),

    #[error("expected a {expected} document, found `{found}`")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
