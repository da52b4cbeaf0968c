use alloc::vec;
use alloc::vec::Vec;

use super::ExpSumError;
use crate::arith::{self, SieveTable};

/// `𝔼 = {n : {n^α} ∈ [c, d)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracWindow {
    pub alpha: f64,
    pub c: f64,
    pub d: f64,
}

impl FracWindow {
    pub fn new(alpha: f64, c: f64, d: f64) -> Result<Self, ExpSumError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ExpSumError::InvalidSpec("alpha must lie in (0, 1)"));
        }
        if !(0.0 <= c && c < d && d <= 1.0) {
            return Err(ExpSumError::InvalidSpec("need 0 <= c < d <= 1"));
        }
        Ok(FracWindow { alpha, c, d })
    }

    pub fn length(&self) -> f64 {
        self.d - self.c
    }

    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        let f =
            crate::phase::frac_monomial_u64(1.0, n, self.alpha, crate::phase::DEFAULT_DD_THRESHOLD);
        f >= self.c && f < self.d
    }
}

fn check_table(table: &SieveTable, x: u64) -> Result<(), ExpSumError> {
    if table.lo() > 2 || table.hi() <= x {
        return Err(ExpSumError::TableTooSmall {
            lo: table.lo(),
            hi: table.hi(),
        });
    }
    Ok(())
}

/// Primes `p <= X` with `{p^α} ∈ [c, d)`, increasing.
pub fn window_primes(
    x: u64,
    win: &FracWindow,
    table: &SieveTable,
) -> Result<Vec<u64>, ExpSumError> {
    check_table(table, x)?;
    Ok(table
        .primes_in(2, x + 1)
        .filter(|&p| win.contains(p))
        .collect())
}

/// `π_I(X; q, a) = #{p <= X : {p^α} ∈ I, p ≡ a (q)}`.
pub fn count_pi_i(
    x: u64,
    q: u64,
    a: u64,
    win: &FracWindow,
    table: &SieveTable,
) -> Result<u64, ExpSumError> {
    if q == 0 || a >= q {
        return Err(ExpSumError::InvalidSpec("need q >= 1 and 0 <= a < q"));
    }
    if q > 1 && arith::gcd(a, q) != 1 {
        return Err(ExpSumError::InvalidSpec("a must be coprime to q"));
    }
    check_table(table, x)?;
    Ok(table
        .primes_in(2, x + 1)
        .filter(|&p| p % q == a && win.contains(p))
        .count() as u64)
}

/// Counts of window primes `p <= X` in every residue class mod `q`.
pub fn count_by_residue(primes: &[u64], q: u64) -> Vec<u64> {
    let mut buckets = vec![0u64; q as usize];
    for &p in primes {
        buckets[(p % q) as usize] += 1;
    }
    buckets
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QDeviation {
    pub q: u64,
    /// Least reduced residue attaining the maximum.
    pub worst_a: u64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub x: u64,
    pub q_max: u64,
    pub alpha: f64,
    pub c: f64,
    pub d: f64,
    /// `π_I(X)`.
    pub pi_i: u64,
    pub per_q: Vec<QDeviation>,
    pub total: f64,
}

/// `max_{(a,q)=1} |π_I(X;q,a) - π_I(X)/φ(q)|` for one modulus.
pub fn q_deviation(primes: &[u64], q: u64) -> QDeviation {
    let buckets = count_by_residue(primes, q);
    let phi = arith::euler_phi(q).expect("q >= 1") as f64;
    let mean = primes.len() as f64 / phi;
    let mut best = QDeviation {
        q,
        worst_a: 0,
        deviation: -1.0,
    };
    for a in 0..q {
        if q > 1 && arith::gcd(a, q) != 1 {
            continue;
        }
        let dev = (buckets[a as usize] as f64 - mean).abs();
        if dev > best.deviation {
            best = QDeviation {
                q,
                worst_a: a,
                deviation: dev,
            };
        }
    }
    best
}

/// `Σ_{q <= Q} max_{(a,q)=1} |π_I(X;q,a) - π_I(X)/φ(q)|`.
pub fn bv_discrepancy(
    x: u64,
    q_max: u64,
    win: &FracWindow,
    table: &SieveTable,
) -> Result<DiscrepancyReport, ExpSumError> {
    let primes = window_primes(x, win, table)?;
    bv_discrepancy_from_primes(x, q_max, win, &primes, |q| q_deviation(&primes, q))
}

/// Same statistic from a precomputed window-prime list; `per_q` computes the
/// deviation of one modulus so callers may evaluate moduli in parallel.
pub fn bv_discrepancy_from_primes(
    x: u64,
    q_max: u64,
    win: &FracWindow,
    primes: &[u64],
    per_q: impl Fn(u64) -> QDeviation,
) -> Result<DiscrepancyReport, ExpSumError> {
    if q_max <= 2 || q_max >= x {
        return Err(ExpSumError::InvalidSpec("need 2 < Q < X"));
    }
    let per_q: Vec<QDeviation> = (1..=q_max).map(per_q).collect();
    let total = per_q.iter().map(|d| d.deviation).sum();
    Ok(DiscrepancyReport {
        x,
        q_max,
        alpha: win.alpha,
        c: win.c,
        d: win.d,
        pi_i: primes.len() as u64,
        per_q,
        total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelReport {
    pub theta: f64,
    /// Whether `0 < α < 1/9`, the range where the level is claimed.
    pub in_scope: bool,
}

/// `θ = 2/5 - 3α/5`.
pub fn level_of_distribution(alpha: f64) -> LevelReport {
    LevelReport {
        theta: 0.4 - 0.6 * alpha,
        in_scope: alpha > 0.0 && alpha < 1.0 / 9.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauMoment {
    pub k: u32,
    pub x: u64,
    /// `sup_{3 <= t <= x} Σ_{n<=t} τ_k(n) / (t (log t)^(k-1))`.
    pub constant: f64,
    pub argmax: u64,
}

/// Fits the constant in `Σ_{n<=x} τ_k(n) <= c x (log x)^(k-1)`.
pub fn tau_moment_constant(k: u32, x: u64) -> Result<TauMoment, ExpSumError> {
    if k == 0 || !(3..=10_000_000).contains(&x) {
        return Err(ExpSumError::InvalidSpec("need k >= 1 and 3 <= x <= 1e7"));
    }
    let n = x as usize;
    let mut tau = vec![1u64; n + 1];
    tau[0] = 0;
    // τ_{j+1} = τ_j * 1 by Dirichlet convolution.
    for _ in 1..k {
        let mut next = vec![0u64; n + 1];
        for (d, &t) in tau.iter().enumerate().skip(1) {
            let mut m = d;
            while m <= n {
                next[m] += t;
                m += d;
            }
        }
        tau = next;
    }
    let mut sum = 0u64;
    let mut best = TauMoment {
        k,
        x,
        constant: 0.0,
        argmax: 3,
    };
    for (t, &v) in tau.iter().enumerate().skip(1) {
        sum += v;
        if t >= 3 {
            let lt = libm::log(t as f64);
            let c = sum as f64 / (t as f64 * libm::pow(lt, (k - 1) as f64));
            if c > best.constant {
                best.constant = c;
                best.argmax = t as u64;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve_primes;

    #[test]
    fn count_examples() {
        let t = sieve_primes(2, 100).unwrap();
        let w = FracWindow::new(0.5, 0.0, 0.5).unwrap();
        assert_eq!(count_pi_i(10, 1, 0, &w, &t).unwrap(), 2);
        let full = FracWindow::new(0.5, 0.0, 1.0).unwrap();
        assert_eq!(count_pi_i(97, 1, 0, &full, &t).unwrap(), 25);
        assert_eq!(count_pi_i(97, 4, 1, &full, &t).unwrap(), 11);
    }

    #[test]
    fn level_examples() {
        assert!((level_of_distribution(0.1).theta - 0.34).abs() < 1e-15);
        assert_eq!(level_of_distribution(0.0).theta, 0.4);
        let l = level_of_distribution(1.0 / 9.0);
        assert!((l.theta - 1.0 / 3.0).abs() < 1e-15);
        assert!(!l.in_scope);
    }

    #[test]
    fn tau_moment_is_positive() {
        let m = tau_moment_constant(2, 10_000).unwrap();
        assert!(m.constant > 0.5 && m.constant < 2.0, "{m:?}");
    }

    #[test]
    fn bv_rejects_large_q() {
        let t = sieve_primes(2, 200).unwrap();
        let w = FracWindow::new(0.1, 0.0, 0.5).unwrap();
        assert!(bv_discrepancy(100, 100, &w, &t).is_err());
        assert!(bv_discrepancy(100, 2, &w, &t).is_err());
    }
}
