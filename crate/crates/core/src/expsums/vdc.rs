use alloc::vec::Vec;
use num_complex::Complex64;

use super::ExpSumError;
use crate::phase;
use crate::summation::CompensatedSum;

pub const DEFAULT_VDC_CONSTANT: f64 = 8.0;

const MAX_PIECES: usize = 4096;

/// `f(x) = coeff · (x + shift)^exponent` on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialPhase {
    pub coeff: f64,
    pub shift: f64,
    pub exponent: f64,
    pub lo: f64,
    pub hi: f64,
}

impl MonomialPhase {
    /// `h (uq)^α (x + ξ)^α`.
    pub fn type_one(h: f64, u: f64, q: f64, alpha: f64, xi: f64, lo: f64, hi: f64) -> Self {
        MonomialPhase {
            coeff: h * libm::pow(u * q, alpha),
            shift: xi,
            exponent: alpha,
            lo,
            hi,
        }
    }

    /// `h (n_1^α - n_2^α) q^α (x + η)^α`.
    #[allow(clippy::too_many_arguments)]
    pub fn type_two(
        h: f64,
        n1: f64,
        n2: f64,
        q: f64,
        alpha: f64,
        eta: f64,
        lo: f64,
        hi: f64,
    ) -> Self {
        let c = h * (libm::pow(n1, alpha) - libm::pow(n2, alpha)) * libm::pow(q, alpha);
        MonomialPhase {
            coeff: c,
            shift: eta,
            exponent: alpha,
            lo,
            hi,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.coeff * libm::pow(x + self.shift, self.exponent)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let e = self.exponent;
        self.coeff * e * (e - 1.0) * libm::pow(x + self.shift, e - 2.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.coeff == 0.0 || self.exponent == 0.0 || self.exponent == 1.0
    }

    fn validate(&self) -> Result<(), ExpSumError> {
        if !(self.lo <= self.hi) || !(self.lo + self.shift > 0.0) {
            return Err(ExpSumError::InvalidSpec("need lo <= hi and lo + shift > 0"));
        }
        Ok(())
    }
}

/// `Σ_{lo <= r <= hi} e(f(r))` over integers `r`.
pub fn phase_sum(phase: &MonomialPhase) -> Result<Complex64, ExpSumError> {
    phase.validate()?;
    let mut acc = CompensatedSum::new();
    let (a, b) = (libm::ceil(phase.lo) as i64, libm::floor(phase.hi) as i64);
    for r in a..=b {
        let f = phase::frac_monomial(phase.coeff, r as f64 + phase.shift, phase.exponent);
        acc.add(phase::unit_from_turns(f));
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdcPiece {
    pub lo: f64,
    pub hi: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VdcReport {
    pub bound: f64,
    pub pieces: Vec<VdcPiece>,
}

impl VdcReport {
    /// `min |f''|` over the whole range.
    pub fn lambda2(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.lambda_min)
            .fold(f64::INFINITY, f64::min)
    }
}

fn lambda_range(phase: &MonomialPhase, a: f64, b: f64) -> (f64, f64) {
    // |f''| is monotone in x for a monomial.
    let (u, v) = (
        phase.second_derivative(a).abs(),
        phase.second_derivative(b).abs(),
    );
    (u.min(v), u.max(v))
}

/// Second-derivative test bound
/// `constant · Σ_pieces ((b - a) λ_max^(1/2) + λ_min^(-1/2))`
/// over pieces on which `max |f''| / min |f''| <= 4`.
pub fn vdc_bound(phase: &MonomialPhase, constant: f64) -> Result<VdcReport, ExpSumError> {
    phase.validate()?;
    if phase.is_degenerate() {
        return Err(ExpSumError::Degenerate);
    }
    let mut pieces = Vec::new();
    let mut stack = alloc::vec![(phase.lo, phase.hi)];
    while let Some((a, b)) = stack.pop() {
        let (lmin, lmax) = lambda_range(phase, a, b);
        if lmax <= 4.0 * lmin || b - a < 2.0 {
            if lmax > 4.0 * lmin {
                return Err(ExpSumError::NeedsSubdivision(
                    pieces.len() + stack.len() + 1,
                ));
            }
            let bound = constant * ((b - a) * libm::sqrt(lmax) + 1.0 / libm::sqrt(lmin));
            pieces.push(VdcPiece {
                lo: a,
                hi: b,
                lambda_min: lmin,
                lambda_max: lmax,
                bound,
            });
        } else {
            // Split at an integer so each lattice point falls in one piece.
            let g = libm::sqrt((a + phase.shift) * (b + phase.shift)) - phase.shift;
            let mid = libm::floor(g).clamp(libm::ceil(a + 1.0), libm::floor(b));
            stack.push((mid, b));
            stack.push((a, mid - 1.0));
        }
        if pieces.len() + stack.len() > MAX_PIECES {
            return Err(ExpSumError::NeedsSubdivision(MAX_PIECES));
        }
    }
    pieces.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    let bound = pieces.iter().map(|p| p.bound).sum();
    Ok(VdcReport { bound, pieces })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_example() {
        let n = 1e4;
        let f = MonomialPhase {
            coeff: 1.0 / n,
            shift: 0.0,
            exponent: 2.0,
            lo: 1.0,
            hi: n,
        };
        let s = phase_sum(&f).unwrap().norm();
        let r = vdc_bound(&f, 8.0).unwrap();
        let expected = 8.0 * ((n - 1.0) * libm::sqrt(2.0 / n) + libm::sqrt(n / 2.0));
        assert!((r.bound - expected).abs() < 1e-9 * expected);
        assert!(s <= r.bound);
        // Full-period Gauss sum with 4 | N: (1 + i) √N.
        assert!((s - libm::sqrt(2.0 * n)).abs() < 1e-8, "{s}");
    }

    #[test]
    fn constant_phase() {
        let f = MonomialPhase {
            coeff: 0.0,
            shift: 0.0,
            exponent: 0.5,
            lo: 3.0,
            hi: 10.0,
        };
        assert!((phase_sum(&f).unwrap() - Complex64::new(8.0, 0.0)).norm() < 1e-12);
        assert_eq!(vdc_bound(&f, 8.0), Err(ExpSumError::Degenerate));
    }

    #[test]
    fn type_one_instance() {
        let f = MonomialPhase::type_one(1.0, 10.0, 7.0, 0.1, 0.0, 1e3, 2e3);
        let r = vdc_bound(&f, 8.0).unwrap();
        assert!(phase_sum(&f).unwrap().norm() <= r.bound);
    }
}
