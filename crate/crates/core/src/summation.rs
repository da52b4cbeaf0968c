//! Order-fixed summation so that block-parallel callers reproduce serial
//! results bit for bit.

use core::ops::Range;
use num_complex::Complex64;

/// Integers per block in range sums over `n`.
pub const BLOCK_SPAN: u64 = 1 << 16;

/// Compensated (Neumaier) accumulator for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

#[inline]
fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.sum.re, &mut self.comp.re, z.re);
        neumaier(&mut self.sum.im, &mut self.comp.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// Pairwise sum; the tree shape depends only on `xs.len()`.
pub fn pairwise(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        n if n <= 8 => xs.iter().fold(Complex64::new(0.0, 0.0), |a, &b| a + b),
        n => pairwise(&xs[..n / 2]) + pairwise(&xs[n / 2..]),
    }
}

pub fn pairwise_real(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        n if n <= 8 => xs.iter().sum(),
        n => pairwise_real(&xs[..n / 2]) + pairwise_real(&xs[n / 2..]),
    }
}

/// Splits `[lo, hi)` at the multiples of `span`.
pub fn blocks(lo: u64, hi: u64, span: u64) -> impl Iterator<Item = Range<u64>> {
    let first = lo / span;
    let last = if hi == 0 { 0 } else { (hi - 1) / span + 1 };
    (first..last.max(first)).filter_map(move |b| {
        let a = (b * span).max(lo);
        let e = ((b + 1) * span).min(hi);
        (a < e).then_some(a..e)
    })
}
