//! Reduction of `coeff * x^alpha` modulo 1 and unit complex numbers from
//! turns.

use crate::ddouble::DoubleDouble;
use num_complex::Complex64;

/// Magnitude of `coeff * x^alpha` above which the double-double path is
/// used. Below it plain `f64` keeps the fractional part within ~1.5e-11.
pub const DEFAULT_DD_THRESHOLD: f64 = 65_536.0;

/// `exp(2πi t)` for `t` measured in turns.
#[inline]
pub fn unit_from_turns(t: f64) -> Complex64 {
    // Centre on zero so the trig argument stays in [-π, π].
    let c = if t >= 0.5 { t - 1.0 } else { t };
    let (s, co) = libm::sincos(core::f64::consts::TAU * c);
    Complex64::new(co, s)
}

/// Fractional part of `coeff * x^alpha` with the default threshold.
#[inline]
pub fn frac_monomial(coeff: f64, x: f64, alpha: f64) -> f64 {
    frac_monomial_with(coeff, x, alpha, DEFAULT_DD_THRESHOLD)
}

pub fn frac_monomial_with(coeff: f64, x: f64, alpha: f64, threshold: f64) -> f64 {
    let v = coeff * libm::pow(x, alpha);
    if v.abs() <= threshold {
        return v - libm::floor(v);
    }
    frac_monomial_dd(coeff, DoubleDouble::from_f64(x), alpha)
}

/// Fractional part of `coeff * n^alpha` for an integer `n`, exact input.
pub fn frac_monomial_u64(coeff: f64, n: u64, alpha: f64, threshold: f64) -> f64 {
    let v = coeff * libm::pow(n as f64, alpha);
    if v.abs() <= threshold {
        return v - libm::floor(v);
    }
    frac_monomial_dd(coeff, DoubleDouble::from_u64(n), alpha)
}

/// Always takes the double-double path.
pub fn frac_monomial_dd(coeff: f64, x: DoubleDouble, alpha: f64) -> f64 {
    x.ln().mul_f64(alpha).exp().mul_f64(coeff).frac()
}

/// Fractional part of a plain real.
#[inline]
pub fn frac(x: f64) -> f64 {
    x - libm::floor(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_circle_points() {
        let z = unit_from_turns(0.25);
        assert!((z.re).abs() < 1e-16 && (z.im - 1.0).abs() < 1e-16);
        let z = unit_from_turns(0.75);
        assert!((z.im + 1.0).abs() < 1e-16);
        assert_eq!(unit_from_turns(0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn sqrt_phases() {
        assert!((frac_monomial(1.0, 13.0, 0.5) - (13f64.sqrt() - 3.0)).abs() < 1e-15);
        // 10^12 has an exact square root; the dd path must land on 0.
        let f = frac_monomial_u64(1.0, 1_000_000_000_000, 0.5, 0.0);
        assert!(f.min(1.0 - f) < 1e-12, "{f}");
    }

    #[test]
    fn paths_agree_below_threshold() {
        for n in (2u64..50_000).step_by(331) {
            let a = frac_monomial_u64(3.0, n, 0.37, f64::INFINITY);
            let b = frac_monomial_u64(3.0, n, 0.37, 0.0);
            let d = (a - b).abs();
            assert!(d.min(1.0 - d) < 1e-12, "n = {n}");
        }
    }
}
