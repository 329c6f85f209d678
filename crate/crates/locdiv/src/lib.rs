//! Local-global divisibility of rational points on elliptic curves over ℚ,
//! tested along explicitly constructed small-density persistent sets of primes.
//!
//! The crate provides:
//!
//! * exact arbitrary-precision arithmetic helpers (`arith`, `sieve`, `snf`),
//! * open subsets of ℤ_p as finite unions of residue classes with exact
//!   Haar measure (`padic`),
//! * Frobenius coordinates along the cyclotomic ℤ_p-extension of ℚ and
//!   prime-set enumeration with density estimation (`frobenius`),
//! * elliptic curve arithmetic over ℚ and over prime fields (`elliptic`),
//! * division polynomials and the global/local p^n-divisibility oracles
//!   (`divisibility`),
//! * first group cohomology H¹ and the obstruction group H¹_loc for finite
//!   groups acting on (ℤ/pⁿ)^r (`cohomology`),
//! * the end-to-end divisibility check pipeline and report types (`pipeline`).

pub mod arith;
pub mod cohomology;
pub mod divisibility;
pub mod elliptic;
pub mod error;
pub mod frobenius;
pub mod padic;
pub mod pipeline;
pub mod sieve;
pub mod snf;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
