use thiserror::Error;

use crate::measure::AtomId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not invertible: value 0 at {0}")]
    NotInvertible(Site),
    #[error("malformed partition prefix: {0}")]
    MalformedPrefix(String),
    #[error("invalid discrete space: {0}")]
    InvalidSpace(String),
    #[error("space is not dyadic beyond atom {0}")]
    NonDyadicTail(AtomId),
    #[error("point lies in M (finite support); no separating radius exists")]
    PointInM,
    #[error("gauge unsupported for set shape: {0}")]
    UnsupportedShape(String),
    #[error("gauge is not strictly below 1 on every atom (fails at {0})")]
    GaugeNotBelowOne(Site),
    #[error("incompatible sequence/partition: {0}")]
    IncompatibleSpec(String),
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Where a pointwise property fails: a specific atom or the constant tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    Atom(AtomId),
    Tail,
}

impl std::fmt::Display for Site {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Site::Atom(a) => write!(f, "atom {a}"),
            Site::Tail => f.write_str("the tail"),
        }
    }
}

/// A syntax error at a 1-based line and column of the parsed text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub type Result<T> = std::result::Result<T, Error>;
