//! Central finite differences with Richardson extrapolation.

use core::ops::{Add, Mul, Sub};

/// Highest derivative order supported.
pub const MAX_ORDER: usize = 6;

const LEVELS: usize = 4;

// Base step as a fraction of the caller's length scale; higher orders need
// wider stencils to keep cancellation noise below the truncation error.
const BASE_STEP: [f64; MAX_ORDER + 1] = [0.0, 0.05, 0.08, 0.12, 0.16, 0.2, 0.25];

/// `j`-th derivative of `f` at `x`, with `scale` the length over which `f`
/// varies appreciably. Returns `None` when `j > MAX_ORDER`.
pub fn derivative<T, F>(f: F, x: f64, j: usize, scale: f64) -> Option<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    if j > MAX_ORDER {
        return None;
    }
    if j == 0 {
        return Some(f(x));
    }
    let h0 = scale * BASE_STEP[j];
    let mut table: [[Option<T>; LEVELS]; LEVELS] = [[None; LEVELS]; LEVELS];
    for level in 0..LEVELS {
        let h = h0 / (1u32 << level) as f64;
        table[level][0] = Some(central(&f, x, j, h));
        for k in 1..=level {
            let hi = table[level][k - 1].unwrap();
            let lo = table[level - 1][k - 1].unwrap();
            let r = (4u32.pow(k as u32) - 1) as f64;
            table[level][k] = Some(hi + (hi - lo) * (1.0 / r));
        }
    }
    table[LEVELS - 1][LEVELS - 1]
}

/// Plain central difference `Δ_h^j f(x) / h^j` on the symmetric stencil.
pub fn central<T, F>(f: &F, x: f64, j: usize, h: f64) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let mut binom = 1.0;
    let mut acc: Option<T> = None;
    for i in 0..=j {
        let node = x + (j as f64 / 2.0 - i as f64) * h;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let term = f(node) * (sign * binom);
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
        binom = binom * (j - i) as f64 / (i + 1) as f64;
    }
    acc.unwrap() * libm::pow(h, -(j as f64))
}
