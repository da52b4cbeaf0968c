//! Numerics for exponential sums over primes in arithmetic progressions
//! restricted by the fractional part of `p^alpha`.
//!
//! The crate is `no_std` (it needs `alloc`) and covers:
//!
//! - [`arith`]: segmented sieve, factorization, `Λ`, `μ`, `φ`, `τ_k`,
//!   modular inverses and primitive roots.
//! - [`smoothing`]: the `C^∞` cutoff `ψ` and the refined dyadic partition of
//!   unity `{Ψ_D}` on the grid `Θ^l`.
//! - [`decomp`]: Heath-Brown identity term enumeration and the Type I/II/III
//!   classifier for exponent tuples and dyadic tuples.
//! - [`expsums`]: prime exponential sums, the smoothed `Λ`-weighted sum,
//!   `π_I(X; q, a)`, the Bombieri-Vinogradov type discrepancy, van der
//!   Corput bounds and bilinear sums.
//! - [`charkloost`]: Dirichlet characters, Gauss sums, Kloosterman sums and
//!   the Weil bound.
//! - [`oscillatory`]: oscillatory integral quadrature, non-stationary bounds,
//!   stationary phase expansions and numerical Poisson summation checks.
//!
//! Threading, file formats and the command line live in the companion `fpl`
//! crate. Everything here is a pure function of its inputs, and reductions
//! are performed in a fixed block order so that results do not depend on how
//! callers schedule the blocks.

#![no_std]
#![deny(unsafe_code)]
// `!(x > 0.0)` is how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod charkloost;
pub mod ddouble;
pub mod decomp;
pub mod expsums;
pub mod numdiff;
pub mod oscillatory;
pub mod phase;
pub mod smoothing;
pub mod summation;

pub use num_complex::Complex64;

/// `e(x) = exp(2πix)`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    phase::unit_from_turns(x - libm::floor(x))
}
