//! Parallel drivers over the core routines.
//!
//! Work is split into blocks that depend only on the inputs, never on the
//! thread count, and partial results are combined in block order. Every
//! driver therefore returns the same bits on any pool.

use std::hash::{DefaultHasher, Hash, Hasher};

use num_complex::Complex64;
use rayon::prelude::*;

use fpl_core::arith::{self, base_primes, sieve_segment_words, SieveTable, DEFAULT_SEGMENT};
use fpl_core::charkloost::{self, CharacterTable, KloostermanKernel, KloostermanValue, WEIL_SLACK};
use fpl_core::decomp;
use fpl_core::expsums::{
    bv_discrepancy_from_primes, combine_blocks, exp_sum_block, q_deviation, CountedSum,
    DiscrepancyReport, ExpSumSpec, FracWindow,
};
use fpl_core::oscillatory::{self, GridCase, PoissonReport};
use fpl_core::summation::{self, BLOCK_SPAN};

use crate::error::{Context, FplError, Result};

pub fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| FplError::Resource(format!("thread pool: {e}")))
}

/// `sieve_primes` with segments sieved in parallel.
pub fn sieve(lo: u64, hi: u64) -> Result<SieveTable> {
    arith::check_range(lo, hi).field("hi")?;
    let root = (hi as f64).sqrt() as u64 + 1;
    let base = base_primes(root.min(u32::MAX as u64) as u32);
    let starts: Vec<u64> = (lo..hi).step_by(DEFAULT_SEGMENT as usize).collect();
    let parts: Vec<Vec<u64>> = starts
        .par_iter()
        .map(|&s| sieve_segment_words(s, (s + DEFAULT_SEGMENT).min(hi), &base))
        .collect();
    SieveTable::from_words(lo, hi, parts.concat()).field("hi")
}

/// `T` with prime blocks summed in parallel.
pub fn exp_sum(spec: &ExpSumSpec, table: &SieveTable) -> Result<CountedSum> {
    spec.validate().field("spec")?;
    if table.lo() > spec.x.max(2) || table.hi() < spec.y {
        return Err(FplError::config("X", "sieve table does not cover [X, Y)"));
    }
    let ranges: Vec<_> = summation::blocks(spec.x, spec.y, BLOCK_SPAN).collect();
    let parts: Vec<CountedSum> = ranges
        .into_par_iter()
        .map(|r| exp_sum_block(spec, table, r))
        .collect();
    Ok(combine_blocks(&parts))
}

/// Primes `p <= X` with `{p^α}` in the window, in increasing order.
pub fn window_primes(x: u64, win: &FracWindow, table: &SieveTable) -> Result<Vec<u64>> {
    if table.lo() > 2 || table.hi() <= x {
        return Err(FplError::config("X", "sieve table does not cover [2, X]"));
    }
    let ranges: Vec<_> = summation::blocks(2, x + 1, BLOCK_SPAN).collect();
    let parts: Vec<Vec<u64>> = ranges
        .into_par_iter()
        .map(|r| {
            table
                .primes_in(r.start, r.end)
                .filter(|&p| win.contains(p))
                .collect()
        })
        .collect();
    Ok(parts.concat())
}

/// `π(X)`.
pub fn prime_count(x: u64, table: &SieveTable) -> u64 {
    let ranges: Vec<_> = summation::blocks(2, x + 1, BLOCK_SPAN).collect();
    ranges
        .into_par_iter()
        .map(|r| table.primes_in(r.start, r.end).count() as u64)
        .sum()
}

/// Discrepancy statistic with moduli evaluated in parallel.
pub fn bv(x: u64, q_max: u64, win: &FracWindow, table: &SieveTable) -> Result<DiscrepancyReport> {
    if q_max <= 2 || q_max >= x {
        return Err(FplError::config("Q", "need 2 < Q < X"));
    }
    let primes = window_primes(x, win, table)?;
    let devs: Vec<_> = (1..=q_max)
        .into_par_iter()
        .map(|q| q_deviation(&primes, q))
        .collect();
    bv_discrepancy_from_primes(x, q_max, win, &primes, |q| devs[(q - 1) as usize]).field("Q")
}

/// Counts of window primes and of all primes `p <= X` by residue mod `q`.
pub fn residue_counts(
    x: u64,
    q: u64,
    win: &FracWindow,
    table: &SieveTable,
) -> Result<(Vec<u64>, Vec<u64>)> {
    if q == 0 {
        return Err(FplError::config("q", "must be at least 1"));
    }
    if table.lo() > 2 || table.hi() <= x {
        return Err(FplError::config("X", "sieve table does not cover [2, X]"));
    }
    let ranges: Vec<_> = summation::blocks(2, x + 1, BLOCK_SPAN).collect();
    let parts: Vec<(Vec<u64>, Vec<u64>)> = ranges
        .into_par_iter()
        .map(|r| {
            let (mut inside, mut all) = (vec![0u64; q as usize], vec![0u64; q as usize]);
            for p in table.primes_in(r.start, r.end) {
                let k = (p % q) as usize;
                all[k] += 1;
                if win.contains(p) {
                    inside[k] += 1;
                }
            }
            (inside, all)
        })
        .collect();
    let mut inside = vec![0u64; q as usize];
    let mut all = vec![0u64; q as usize];
    for (i, a) in parts {
        inside.iter_mut().zip(i).for_each(|(s, v)| *s += v);
        all.iter_mut().zip(a).for_each(|(s, v)| *s += v);
    }
    Ok((inside, all))
}

/// One row of the Heath-Brown residual report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HbRow {
    pub n: u64,
    pub v: u64,
    pub lambda: f64,
    pub total: f64,
    pub terms: usize,
    pub within_validity: bool,
}

impl HbRow {
    pub fn residual(&self) -> f64 {
        (self.total - self.lambda).abs()
    }
}

/// `V = ⌈n^(1/k)⌉ + 1`, the smallest cap that keeps `n <= V^k` with room.
pub fn default_cap(n: u64, k: u32) -> u64 {
    let mut v = (n as f64).powf(1.0 / k as f64).ceil() as u64;
    while (v as f64).powi(k as i32) < n as f64 {
        v += 1;
    }
    v + 1
}

pub fn heath_brown_rows(n_lo: u64, n_hi: u64, k: u32, v: Option<u64>) -> Result<Vec<HbRow>> {
    (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| {
            let v = v.unwrap_or_else(|| default_cap(n, k));
            let list = decomp::heath_brown_terms(n, k, v).field("nmax")?;
            Ok(HbRow {
                n,
                v,
                lambda: arith::von_mangoldt(n).field("nmax")?,
                total: list.total(),
                terms: list.terms.len(),
                within_validity: list.within_validity(),
            })
        })
        .collect()
}

/// Every `S_q(u, v)` with `0 <= u, v < q` for the given moduli, ordered by
/// `(q, u, v)`.
pub fn kloosterman_table(moduli: &[u64]) -> Result<Vec<KloostermanValue>> {
    let per_q: Vec<Result<Vec<KloostermanValue>>> = moduli
        .par_iter()
        .map(|&q| {
            let k = KloostermanKernel::new(q).field("qmax")?;
            let q = q as i64;
            Ok((0..q)
                .flat_map(|u| (0..q).map(move |v| (u, v)))
                .map(|(u, v)| k.eval(u, v))
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for part in per_q {
        out.extend(part?);
    }
    Ok(out)
}

/// Weil check over every `(u, v)` mod `q`, without keeping the values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeilSummary {
    pub q: u64,
    pub sums: u64,
    pub violations: u64,
    pub min_margin: f64,
    pub max_imag_residual: f64,
    /// Hash of every value's bits in `(u, v)` order.
    pub digest: u64,
}

pub fn weil_summary(q: u64) -> Result<WeilSummary> {
    let k = KloostermanKernel::new(q).field("qmax")?;
    let rows: Vec<(u64, f64, f64, u64)> = (0..q as i64)
        .into_par_iter()
        .map(|u| {
            let (mut bad, mut margin, mut imag) = (0u64, f64::INFINITY, 0.0f64);
            let mut h = DefaultHasher::new();
            for v in 0..q as i64 {
                let s = k.eval(u, v);
                bad += (s.margin() < -WEIL_SLACK) as u64;
                margin = margin.min(s.margin());
                imag = imag.max(s.imag_residual);
                s.value.to_bits().hash(&mut h);
            }
            (bad, margin, imag, h.finish())
        })
        .collect();
    let mut h = DefaultHasher::new();
    let mut out = WeilSummary {
        q,
        sums: q * q,
        violations: 0,
        min_margin: f64::INFINITY,
        max_imag_residual: 0.0,
        digest: 0,
    };
    for (bad, margin, imag, row) in rows {
        out.violations += bad;
        out.min_margin = out.min_margin.min(margin);
        out.max_imag_residual = out.max_imag_residual.max(imag);
        row.hash(&mut h);
    }
    out.digest = h.finish();
    Ok(out)
}

/// Largest `|projection - [m ≡ a]|` over all reduced `a` and all `m` mod `q`.
pub fn orthogonality_defect(q: u64) -> Result<f64> {
    let t = CharacterTable::new(q).field("q")?;
    let units: Vec<u64> = (1..q).filter(|&a| arith::gcd(a, q) == 1).collect();
    let worst = units
        .par_iter()
        .map(|&a| {
            let mut w = 0.0f64;
            for m in 0..q {
                let p =
                    charkloost::orthogonality_project(&t, a as i64, m as i64).expect("a is a unit");
                let want = if m == a { 1.0 } else { 0.0 };
                w = w.max((p - want).abs());
            }
            w
        })
        .collect::<Vec<_>>();
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// Both Poisson checks on every case of the verification grid.
pub fn poisson_grid() -> Result<Vec<(GridCase, PoissonReport, PoissonReport)>> {
    oscillatory::verification_grid()
        .into_par_iter()
        .map(|c| {
            let first =
                oscillatory::poisson_verify_first(&c.first().field("grid")?).field("grid")?;
            let second =
                oscillatory::poisson_verify_second(&c.second().field("grid")?).field("grid")?;
            Ok((c, first, second))
        })
        .collect()
}

/// `|T|` for `a = 1` and every `q <= q_max`, in order of `q`.
pub fn ratio_sweep(
    base: &ExpSumSpec,
    q_max: u64,
    table: &SieveTable,
) -> Result<Vec<(u64, Complex64, u64)>> {
    (1..=q_max)
        .map(|q| {
            let spec = ExpSumSpec {
                q,
                a: if q == 1 { 0 } else { 1 },
                ..*base
            };
            exp_sum(&spec, table).map(|c| (q, c.value, c.count))
        })
        .collect()
}
