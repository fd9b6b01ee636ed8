use thiserror::Error;

/// Errors raised by the toolkit. Every variant corresponds to a violated
/// precondition; numeric stalemates are reported as values, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("negative input to a square root")]
    NegativeSqrt,
    #[error("logarithm of a non-positive value")]
    NonPositiveLog,
    #[error("acosh argument below 1")]
    AcoshDomain,
    #[error("division by an enclosure containing zero")]
    DivisionByZero,
    #[error("fraction {p}/{q} is not reduced")]
    NotReduced { p: u64, q: u64 },
    #[error("fraction {p}/{q} is outside {domain}")]
    OutOfDomain {
        p: u64,
        q: u64,
        domain: &'static str,
    },
    #[error("({q},{p}) is not a coprime pair with q >= p >= 0")]
    NotCoprimePair { q: u64, p: u64 },
    #[error("({x},{y}) is not a sector point with q >= p >= 0")]
    NotInSector { x: i64, y: i64 },
    #[error("the zero class has no norm")]
    ZeroVector,
    #[error("{0}")]
    Endpoint(&'static str),
    #[error("{0}")]
    SlopeRegime(String),
    #[error("precision cap reached before {0} could be certified")]
    UndecidedAtCap(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("snapshot validation failed: {0}")]
    Snapshot(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
