//! Integer sieves, factorization and the multiplicative functions used by
//! every other module.

mod factor;
mod functions;
mod sieve;

pub use factor::{factor, is_prime_u64, FactoredInteger};
pub use functions::{
    euler_phi, gcd, inv_mod, mobius, mod_pow, mul_mod, primitive_root, tau_k, von_mangoldt,
};
pub use sieve::{
    base_primes, check_range, sieve_primes, sieve_primes_with_factors, sieve_segment_words,
    SieveTable, DEFAULT_SEGMENT, MAX_HI, MAX_SPAN,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("argument must be at least 1, got 0")]
    Zero,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("empty range: lo = {lo} is not below hi = {hi}")]
    EmptyRange { lo: u64, hi: u64 },
    #[error("range [{lo}, {hi}) exceeds the sieve budget")]
    RangeTooLarge { lo: u64, hi: u64 },
    #[error("{a} is not invertible modulo {q}")]
    NotInvertible { a: u64, q: u64 },
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
}
