//! Computational tools for the distribution of `alpha p^2 + beta` modulo one
//! over primes `p` with `p + 2` an almost prime.

pub mod arith;
pub mod bump;
pub mod config;
pub mod det;
pub mod diophantine;
pub mod error;
pub mod experiment;
pub mod expsum;
pub mod primes;
pub mod report;
pub mod sieve;

pub use arith::{FixedReal, UnitFrac, FRAC_BITS};
pub use error::{Error, Result};
