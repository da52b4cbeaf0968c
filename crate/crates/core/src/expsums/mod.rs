//! Direct evaluators for prime exponential sums, the smoothed `Λ`-weighted
//! sum, prime counts in fractional-part windows and the discrepancy
//! statistic, plus van der Corput bounds and bilinear sums.

mod bilinear;
mod distribution;
mod vdc;

pub use bilinear::{bilinear_sum, BilinearInput, BilinearReport, DEFAULT_BILINEAR_BUDGET};
pub use distribution::{
    bv_discrepancy, bv_discrepancy_from_primes, count_by_residue, count_pi_i,
    level_of_distribution, q_deviation, tau_moment_constant, window_primes, DiscrepancyReport,
    FracWindow, LevelReport, QDeviation, TauMoment,
};
pub use vdc::{phase_sum, vdc_bound, MonomialPhase, VdcPiece, VdcReport, DEFAULT_VDC_CONSTANT};

use alloc::vec::Vec;
use core::ops::Range;
use num_complex::Complex64;
use thiserror::Error;

use crate::arith::{self, ArithError, SieveTable};
use crate::phase;
use crate::smoothing::BumpWindow;
use crate::summation::{self, CompensatedSum, BLOCK_SPAN};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpSumError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("invalid parameters: {0}")]
    InvalidSpec(&'static str),
    #[error("sieve table [{lo}, {hi}) does not cover the summation range")]
    TableTooSmall { lo: u64, hi: u64 },
    #[error("phase has identically vanishing second derivative")]
    Degenerate,
    #[error("|f''| ratio still above 4 after {0} subdivisions")]
    NeedsSubdivision(usize),
    #[error("{needed} terms exceed the budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
}

/// Parameters `(X, Y, h, α, q, a)` of `T = Σ_{X <= p < Y, p ≡ a (q)} e(h p^α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpSumSpec {
    pub x: u64,
    pub y: u64,
    pub h: i64,
    pub alpha: f64,
    pub q: u64,
    pub a: u64,
}

impl ExpSumSpec {
    /// Checks `X < Y <= 2X`, `0 < α < 1`, `a < q` and `gcd(a, q) = 1` for
    /// `q > 1`. Any `h` is accepted; `h = 0` gives the plain prime count.
    pub fn validate(&self) -> Result<(), ExpSumError> {
        if self.x < 2 || self.x >= self.y || self.y > 2 * self.x {
            return Err(ExpSumError::InvalidSpec("need 2 <= X < Y <= 2X"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ExpSumError::InvalidSpec("alpha must lie in (0, 1)"));
        }
        if self.q == 0 || self.a >= self.q {
            return Err(ExpSumError::InvalidSpec("need q >= 1 and 0 <= a < q"));
        }
        if self.q > 1 && arith::gcd(self.a, self.q) != 1 {
            return Err(ExpSumError::InvalidSpec("a must be coprime to q"));
        }
        Ok(())
    }

    /// `1 <= |h| <= (log X)^c`.
    pub fn h_in_range(&self, c: f64) -> bool {
        let h = self.h.unsigned_abs() as f64;
        h >= 1.0 && h <= libm::pow(libm::log(self.x as f64), c)
    }

    #[inline]
    pub fn term(&self, n: u64) -> Complex64 {
        phase::unit_from_turns(phase::frac_monomial_u64(
            self.h as f64,
            n,
            self.alpha,
            phase::DEFAULT_DD_THRESHOLD,
        ))
    }
}

/// A sum together with the number of terms it contains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountedSum {
    pub value: Complex64,
    pub count: u64,
}

fn check_cover(table: &SieveTable, lo: u64, hi: u64) -> Result<(), ExpSumError> {
    if lo < hi && (table.lo() > lo.max(2) || table.hi() < hi) {
        return Err(ExpSumError::TableTooSmall {
            lo: table.lo(),
            hi: table.hi(),
        });
    }
    Ok(())
}

/// Partial sum of `T` over the primes in `range`.
pub fn exp_sum_block(spec: &ExpSumSpec, table: &SieveTable, range: Range<u64>) -> CountedSum {
    let mut acc = CompensatedSum::new();
    let mut count = 0;
    for p in table.primes_in(range.start, range.end) {
        if p % spec.q == spec.a {
            acc.add(spec.term(p));
            count += 1;
        }
    }
    CountedSum {
        value: acc.value(),
        count,
    }
}

/// Combines block partials in block order.
pub fn combine_blocks(parts: &[CountedSum]) -> CountedSum {
    let values: Vec<Complex64> = parts.iter().map(|c| c.value).collect();
    CountedSum {
        value: summation::pairwise(&values),
        count: parts.iter().map(|c| c.count).sum(),
    }
}

/// `T`; an empty progression gives zero with count zero.
pub fn exp_sum_primes(spec: &ExpSumSpec, table: &SieveTable) -> Result<CountedSum, ExpSumError> {
    spec.validate()?;
    check_cover(table, spec.x, spec.y)?;
    let parts: Vec<CountedSum> = summation::blocks(spec.x, spec.y, BLOCK_SPAN)
        .map(|r| exp_sum_block(spec, table, r))
        .collect();
    Ok(combine_blocks(&parts))
}

/// Smoothed and sharp `Λ`-weighted sums over `n ≡ a (q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSum {
    /// `Σ ψ(n/X) Λ(n) e(h n^α)`.
    pub smoothed: Complex64,
    /// `Σ_{X <= n < Y} Λ(n) e(h n^α)`.
    pub sharp: Complex64,
    /// `Σ Λ(n)` over the transition bands `(1-Δ)X < n < X` and
    /// `Y <= n < (y+Δ)X`.
    pub band_mass: f64,
}

/// Integers `n` in `[lo, hi)` with `Λ(n) != 0`, paired with `Λ(n)`, in
/// increasing order. `table` must cover `[2, hi)`.
pub fn prime_powers_in(table: &SieveTable, lo: u64, hi: u64) -> Vec<(u64, f64)> {
    let mut out: Vec<(u64, f64)> = table
        .primes_in(lo, hi)
        .map(|p| (p, libm::log(p as f64)))
        .collect();
    let mut extra = Vec::new();
    for p in table.primes_in(2, hi) {
        let Some(mut pk) = p.checked_mul(p) else {
            break;
        };
        if pk >= hi {
            break;
        }
        while pk < hi {
            if pk >= lo {
                extra.push((pk, libm::log(p as f64)));
            }
            match pk.checked_mul(p) {
                Some(v) => pk = v,
                None => break,
            }
        }
    }
    if !extra.is_empty() {
        out.extend(extra);
        out.sort_unstable_by_key(|&(n, _)| n);
    }
    out
}

/// The smoothed sum `W`, reported with and without smoothing.
///
/// The window plateau must be `[1, Y/X]`.
pub fn weighted_sum_w(
    spec: &ExpSumSpec,
    window: &BumpWindow,
    table: &SieveTable,
) -> Result<WeightedSum, ExpSumError> {
    spec.validate()?;
    let x = spec.x as f64;
    if (window.y() - spec.y as f64 / x).abs() > 1e-12 * window.y() {
        return Err(ExpSumError::InvalidSpec("window plateau must be [1, Y/X]"));
    }
    let (s_lo, s_hi) = window.support();
    let lo = (libm::floor(s_lo * x) as u64).max(2);
    let hi = libm::ceil(s_hi * x) as u64 + 1;
    if table.lo() > 2 || table.hi() < hi {
        return Err(ExpSumError::TableTooSmall {
            lo: table.lo(),
            hi: table.hi(),
        });
    }
    let terms: Vec<(u64, f64)> = prime_powers_in(table, lo, hi)
        .into_iter()
        .filter(|&(n, _)| n % spec.q == spec.a)
        .collect();
    let mut smoothed = Vec::new();
    let mut sharp = Vec::new();
    let mut band = Vec::new();
    for chunk in terms.chunk_by(|a, b| a.0 / BLOCK_SPAN == b.0 / BLOCK_SPAN) {
        let mut sm = CompensatedSum::new();
        let mut sh = CompensatedSum::new();
        let mut bm = 0.0;
        for &(n, lambda) in chunk {
            let w = window.eval(n as f64 / x);
            if w == 0.0 {
                continue;
            }
            let z = spec.term(n) * lambda;
            sm.add(z * w);
            if n >= spec.x && n < spec.y {
                sh.add(z);
            } else {
                bm += lambda;
            }
        }
        smoothed.push(sm.value());
        sharp.push(sh.value());
        band.push(bm);
    }
    Ok(WeightedSum {
        smoothed: summation::pairwise(&smoothed),
        sharp: summation::pairwise(&sharp),
        band_mass: summation::pairwise_real(&band),
    })
}
