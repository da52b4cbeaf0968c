use alloc::vec::Vec;
use core::ops::RangeInclusive;
use num_complex::Complex64;

use super::ExpSumError;
use crate::phase;
use crate::smoothing::BumpWindow;
use crate::summation::{self, CompensatedSum};

pub const DEFAULT_BILINEAR_BUDGET: u64 = 1_000_000;

/// `W = Σ_m Σ_n γ(m) β(n) ψ(mn/X) e(h (mn)^α)` over `mn ≡ a (q)`.
pub struct BilinearInput<'a> {
    pub m_range: RangeInclusive<u64>,
    pub n_range: RangeInclusive<u64>,
    pub gamma: &'a dyn Fn(u64) -> f64,
    pub beta: &'a dyn Fn(u64) -> f64,
    pub q: u64,
    pub a: u64,
    pub h: f64,
    pub alpha: f64,
    pub x: f64,
    pub window: &'a BumpWindow,
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearReport {
    pub value: Complex64,
    pub terms: u64,
    /// `Σ_m |γ(m)|^2`.
    pub gamma_sq: f64,
    /// `Σ_m |Σ_n β(n) ψ(mn/X) e(h (mn)^α)|^2`.
    pub inner_sq: f64,
    /// `Σ_m Σ_n β(n)^2 ψ(mn/X)^2`.
    pub diagonal: f64,
    /// `S(M, N)`: the `n_1 < n_2` part, so `inner_sq = diagonal + 2 Re S`.
    pub off_diagonal: Complex64,
}

impl BilinearReport {
    /// Cauchy-Schwarz bound `(Σ|γ|^2 · Σ_m |inner|^2)^(1/2)` on `|W|`.
    pub fn cauchy_bound(&self) -> f64 {
        libm::sqrt(self.gamma_sq * self.inner_sq)
    }
}

pub fn bilinear_sum(input: &BilinearInput<'_>) -> Result<BilinearReport, ExpSumError> {
    let (m0, m1) = (*input.m_range.start(), *input.m_range.end());
    let (n0, n1) = (*input.n_range.start(), *input.n_range.end());
    if m0 == 0 || n0 == 0 || m0 > m1 || n0 > n1 {
        return Err(ExpSumError::InvalidSpec(
            "ranges must be non-empty and start at 1 or above",
        ));
    }
    if input.q == 0 || input.a >= input.q {
        return Err(ExpSumError::InvalidSpec("need q >= 1 and 0 <= a < q"));
    }
    let needed = (m1 - m0 + 1).saturating_mul(n1 - n0 + 1);
    if needed > input.budget {
        return Err(ExpSumError::BudgetExceeded {
            needed,
            budget: input.budget,
        });
    }
    let mut value = Vec::new();
    let mut gamma_sq = Vec::new();
    let mut inner_sq = Vec::new();
    let mut diagonal = Vec::new();
    let mut off = Vec::new();
    let mut z = Vec::new();
    for m in m0..=m1 {
        let g = (input.gamma)(m);
        gamma_sq.push(g * g);
        z.clear();
        let mut diag = 0.0;
        for n in n0..=n1 {
            let mn = m * n;
            if mn % input.q != input.a {
                continue;
            }
            let w = input.window.eval(mn as f64 / input.x);
            if w == 0.0 {
                continue;
            }
            let b = (input.beta)(n);
            let f = phase::frac_monomial_u64(input.h, mn, input.alpha, phase::DEFAULT_DD_THRESHOLD);
            z.push(phase::unit_from_turns(f) * (b * w));
            diag += b * b * w * w;
        }
        let mut inner = CompensatedSum::new();
        let mut s = CompensatedSum::new();
        for &zn in &z {
            // Σ_{n1 < n2} z(n1) conj(z(n2)) via the running prefix.
            s.add(inner.value() * zn.conj());
            inner.add(zn);
        }
        let inner = inner.value();
        value.push(inner * g);
        inner_sq.push(inner.norm_sqr());
        diagonal.push(diag);
        off.push(s.value());
    }
    Ok(BilinearReport {
        value: summation::pairwise(&value),
        terms: needed,
        gamma_sq: summation::pairwise_real(&gamma_sq),
        inner_sq: summation::pairwise_real(&inner_sq),
        diagonal: summation::pairwise_real(&diagonal),
        off_diagonal: summation::pairwise(&off),
    })
}
