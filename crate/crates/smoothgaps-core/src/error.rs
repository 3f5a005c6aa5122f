use alloc::string::String;
use core::fmt;

/// Error type shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A precondition on the inputs was violated.
    Domain(String),
    /// A query went past the limit a table was built for.
    OutOfRange(String),
    /// A configured capacity (segment length, enumeration cap) was exceeded.
    Capacity(String),
    /// An integer has a prime factor outside the supplied prime basis.
    NotSmooth { n: u64, leftover: u64 },
    /// The dyadic pigeonhole construction could not produce a pair at this
    /// height (the densest bin held fewer than two members).
    ConstructionFailed(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::OutOfRange(msg) => write!(f, "out of range: {msg}"),
            Error::Capacity(msg) => write!(f, "capacity exceeded: {msg}"),
            Error::NotSmooth { n, leftover } => {
                write!(f, "{n} is not smooth over the basis (leftover factor {leftover})")
            }
            Error::ConstructionFailed(msg) => write!(f, "construction failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
