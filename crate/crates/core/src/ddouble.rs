//! Double-double arithmetic, just enough to reduce `h * n^alpha` modulo 1
//! when the integer part would otherwise swallow the mantissa.

use core::ops::{Add, Mul, Neg, Sub};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

const LN2: DoubleDouble = DoubleDouble {
    #[allow(clippy::approx_constant)]
    hi: 6.931_471_805_599_453e-1,
    lo: 2.319_046_813_846_299_6e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = DoubleDouble { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    /// Exact for every `u64`.
    pub fn from_u64(n: u64) -> Self {
        let hi = n as f64;
        // `hi` rounds n; the remainder is exact in i128 and fits an f64.
        let lo = (n as i128 - hi as i128) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DoubleDouble { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let r = (self.hi - p - e + self.lo) / b;
        let (hi, lo) = quick_two_sum(q1, r);
        DoubleDouble { hi, lo }
    }

    /// Multiplication by a power of two, exact.
    pub fn scale(self, k: i32) -> Self {
        DoubleDouble {
            hi: libm::scalbn(self.hi, k),
            lo: libm::scalbn(self.lo, k),
        }
    }

    pub fn square(self) -> Self {
        self * self
    }

    /// `exp(x)`; relative error a few units of 2^-104 for `|x| < 700`.
    pub fn exp(self) -> Self {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::ONE;
        }
        let k = libm::round(self.hi / LN2.hi);
        let r = (self - LN2.mul_f64(k)).scale(-10);
        // Taylor series on |r| < 4e-4; 12 terms are far beyond 2^-104.
        let mut term = r;
        let mut sum = r;
        for i in 2..=12 {
            term = (term * r).div_f64(i as f64);
            sum = sum + term;
        }
        // expm1 squaring: (1 + s)^2 - 1 = 2s + s^2 keeps the small part exact.
        for _ in 0..10 {
            sum = sum.scale(1) + sum.square();
        }
        (sum + Self::ONE).scale(k as i32)
    }

    /// Natural logarithm of a positive value.
    pub fn ln(self) -> Self {
        let y = DoubleDouble::from_f64(libm::log(self.hi));
        // One Newton step on exp(y) = x doubles the 53 correct bits.
        let corr = self * (-y).exp() - Self::ONE;
        let y = y + corr;
        let corr = self * (-y).exp() - Self::ONE;
        y + corr
    }

    /// Fractional part in `[0, 1)`.
    pub fn frac(self) -> f64 {
        let fh = self.hi - libm::floor(self.hi);
        let fl = self.lo - libm::floor(self.lo);
        let f = fh + fl;
        let f = f - libm::floor(f);
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[1e-3, 0.5, 1.0, 2.0, 17.25, 1e6, 2.8e14] {
            let d = DoubleDouble::from_f64(x);
            let back = d.ln().exp() - d;
            assert!(back.to_f64().abs() <= 1e-28 * x, "x = {x}: {:?}", back);
        }
    }

    #[test]
    fn exp_one_matches_e() {
        let e = DoubleDouble::ONE.exp();
        assert_eq!(e.hi, core::f64::consts::E);
        // e - hi rounded, from the decimal expansion 2.71828182845904523536028747135...
        assert!(
            (e.lo - 1.445_646_891_729_250_2e-16).abs() < 1e-30,
            "{:e}",
            e.lo
        );
    }

    #[test]
    fn from_u64_is_exact() {
        let n = (1u64 << 60) + 12345;
        let d = DoubleDouble::from_u64(n);
        assert_eq!(d.hi as i128 + d.lo as i128, n as i128);
    }

    #[test]
    fn frac_of_large_values() {
        let d = DoubleDouble {
            hi: 1_048_576.0,
            lo: 0.25,
        };
        assert_eq!(d.frac(), 0.25);
        let d = DoubleDouble {
            hi: 1_048_576.0,
            lo: -0.25,
        };
        assert_eq!(d.frac(), 0.75);
    }
}
