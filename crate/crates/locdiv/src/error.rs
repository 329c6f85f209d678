use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element {value} is not invertible modulo {modulus}")]
    NotInvertible { value: String, modulus: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("subgroup level {m} is not below the set depth {depth}")]
    DepthExceeded { m: u32, depth: u32 },

    #[error("bad reduction: {ell} divides the discriminant of the integral model")]
    BadReduction { ell: u64 },

    #[error("bad prime {ell} for local test: {reason}")]
    BadPrime { ell: u64, reason: String },

    #[error("no admissible primes of the set were found below the bound")]
    EmptySample,

    #[error("matrix group closure exceeded the cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
