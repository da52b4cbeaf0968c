//! Heath-Brown identity terms and the Type I/II/III classifier.

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::arith::{self, ArithError};

/// Absolute slack applied to every boundary comparison.
pub const SLACK: f64 = 1e-12;

/// Default cap on the number of terms enumerated by [`heath_brown_terms`].
pub const DEFAULT_TERM_BUDGET: usize = 2_000_000;

/// Largest tuple accepted by [`classify_exponents`]; Type II is found by
/// subset search.
pub const MAX_COMPONENTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("k = {0} is outside 1..=6")]
    BadK(u32),
    #[error("V must be at least 1")]
    BadV,
    #[error("term enumeration exceeded the budget of {0} terms")]
    BudgetExceeded(usize),
    #[error("sigma = {0} is outside (1/10, 1/2)")]
    SigmaOutOfRange(f64),
    #[error("exponents must be non-negative and sum to 1 (sum = {0})")]
    NotNormalized(f64),
    #[error("{0} components exceed the classifier limit of 24")]
    TooManyComponents(usize),
    #[error("dyadic tuple violates its invariants: {0}")]
    InvalidTuple(&'static str),
}

/// One signed tuple `(d_1, ..., d_2j)` of the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct HbTerm {
    pub sign: i8,
    pub binom: u64,
    pub d: Vec<u64>,
    /// `log d_1 · μ(d_{j+1}) ⋯ μ(d_{2j})`.
    pub weight: f64,
}

impl HbTerm {
    pub fn j(&self) -> usize {
        self.d.len() / 2
    }

    pub fn contribution(&self) -> f64 {
        self.sign as f64 * self.binom as f64 * self.weight
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HbTermList {
    pub n: u64,
    pub k: u32,
    pub v: u64,
    pub terms: Vec<HbTerm>,
}

impl HbTermList {
    pub fn total(&self) -> f64 {
        let mut acc = crate::summation::CompensatedSum::new();
        for t in &self.terms {
            acc.add(num_complex::Complex64::new(t.contribution(), 0.0));
        }
        acc.value().re
    }

    /// Whether `n <= V^k`, the range where the identity is exact.
    pub fn within_validity(&self) -> bool {
        within_validity(self.n, self.k, self.v)
    }
}

pub fn within_validity(n: u64, k: u32, v: u64) -> bool {
    match v.checked_pow(k) {
        Some(p) => n <= p,
        None => true,
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

struct Enumerator<'a> {
    divisors: &'a [u64],
    mu: &'a [i8],
    v: u64,
    j: usize,
    sign: i8,
    binom: u64,
    budget: usize,
    tuple: Vec<u64>,
    out: &'a mut Vec<HbTerm>,
}

impl Enumerator<'_> {
    fn index(&self, d: u64) -> usize {
        self.divisors.binary_search(&d).unwrap()
    }

    // Fills the Möbius slots d_{j+1}..d_{2j} (stored at the tuple's tail),
    // then the free slots d_1..d_j.
    fn mobius_slots(&mut self, slot: usize, rest: u64, mu_prod: i8) -> Result<(), DecompError> {
        if slot == self.j {
            return self.free_slots(0, rest, mu_prod);
        }
        let (divisors, cap) = (self.divisors, self.v.min(rest));
        for &d in divisors.iter().take_while(|&&d| d <= cap) {
            let m = self.mu[self.index(d)];
            if m == 0 || rest % d != 0 {
                continue;
            }
            self.tuple[self.j + slot] = d;
            self.mobius_slots(slot + 1, rest / d, mu_prod * m)?;
        }
        Ok(())
    }

    fn free_slots(&mut self, slot: usize, rest: u64, mu_prod: i8) -> Result<(), DecompError> {
        if slot + 1 == self.j {
            // d_1 = 1 carries log 1 = 0 and is skipped.
            if slot == 0 && rest == 1 {
                return Ok(());
            }
            self.tuple[slot] = rest;
            let d1 = self.tuple[0];
            if d1 == 1 {
                return Ok(());
            }
            if self.out.len() >= self.budget {
                return Err(DecompError::BudgetExceeded(self.budget));
            }
            self.out.push(HbTerm {
                sign: self.sign,
                binom: self.binom,
                d: self.tuple.clone(),
                weight: libm::log(d1 as f64) * mu_prod as f64,
            });
            return Ok(());
        }
        let divisors = self.divisors;
        for &d in divisors.iter().take_while(|&&d| d <= rest) {
            if rest % d != 0 || (slot == 0 && d == 1) {
                continue;
            }
            self.tuple[slot] = d;
            self.free_slots(slot + 1, rest / d, mu_prod)?;
        }
        Ok(())
    }
}

/// Signed tuples of the identity
/// `Λ(n) = Σ_j (-1)^(j-1) C(k,j) Σ log d_1 μ(d_{j+1}) ⋯ μ(d_{2j})`
/// over `d_1 ⋯ d_{2j} = n` with `d_{j+1}, ..., d_{2j} <= V`.
pub fn heath_brown_terms(n: u64, k: u32, v: u64) -> Result<HbTermList, DecompError> {
    heath_brown_terms_with_budget(n, k, v, DEFAULT_TERM_BUDGET)
}

pub fn heath_brown_terms_with_budget(
    n: u64,
    k: u32,
    v: u64,
    budget: usize,
) -> Result<HbTermList, DecompError> {
    if !(1..=6).contains(&k) {
        return Err(DecompError::BadK(k));
    }
    if v == 0 {
        return Err(DecompError::BadV);
    }
    let mut divisors = arith::factor(n)?.divisors();
    divisors.sort_unstable();
    let mu: Vec<i8> = divisors
        .iter()
        .map(|&d| arith::mobius(d))
        .collect::<Result<_, _>>()?;
    let mut terms = Vec::new();
    for j in 1..=k as usize {
        let mut e = Enumerator {
            divisors: &divisors,
            mu: &mu,
            v,
            j,
            sign: if j % 2 == 1 { 1 } else { -1 },
            binom: binomial(k as u64, j as u64),
            budget,
            tuple: vec![0; 2 * j],
            out: &mut terms,
        };
        e.mobius_slots(0, n, 1)?;
    }
    Ok(HbTermList { n, k, v, terms })
}

/// Which clause of the classification a tuple satisfies, with a witness.
/// Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeWitness {
    I { index: usize },
    II { s: Vec<usize>, t: Vec<usize> },
    III { triple: [usize; 3] },
}

impl TypeWitness {
    pub fn kind(&self) -> u8 {
        match self {
            TypeWitness::I { .. } => 1,
            TypeWitness::II { .. } => 2,
            TypeWitness::III { .. } => 3,
        }
    }
}

#[inline]
fn le(a: f64, b: f64) -> bool {
    a <= b + SLACK
}

#[inline]
fn lt(a: f64, b: f64) -> bool {
    a + SLACK < b
}

fn complement(s: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|i| !s.contains(i)).collect()
}

// Depth-first over index lists in lexicographic order; returns the first
// subset accepted by `accept`.
fn least_subset(values: &[f64], accept: &dyn Fn(f64) -> bool) -> Option<Vec<usize>> {
    fn go(
        values: &[f64],
        start: usize,
        cur: &mut Vec<usize>,
        sum: f64,
        accept: &dyn Fn(f64) -> bool,
    ) -> bool {
        for i in start..values.len() {
            cur.push(i);
            let s = sum + values[i];
            if accept(s) || go(values, i + 1, cur, s, accept) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::new();
    go(values, 0, &mut cur, 0.0, accept).then_some(cur)
}

fn least_triple(values: &[f64], accept: &dyn Fn([f64; 3]) -> bool) -> Option<[usize; 3]> {
    let n = values.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut v = [values[i], values[j], values[k]];
                v.sort_by(f64::total_cmp);
                if accept(v) {
                    return Some([i, j, k]);
                }
            }
        }
    }
    None
}

/// Type I/II/III classification of `t` (non-negative, summing to 1) for
/// `1/10 < σ < 1/2`. Each applicable kind appears once with its canonical
/// witness.
pub fn classify_exponents(t: &[f64], sigma: f64) -> Result<Vec<TypeWitness>, DecompError> {
    if !(sigma > 0.1 && sigma < 0.5) {
        return Err(DecompError::SigmaOutOfRange(sigma));
    }
    if t.len() > MAX_COMPONENTS {
        return Err(DecompError::TooManyComponents(t.len()));
    }
    let total: f64 = t.iter().sum();
    if t.iter().any(|&x| !(x >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(DecompError::NotNormalized(total));
    }
    let mut out = Vec::new();
    if let Some(index) = t.iter().position(|&x| le(0.5 + sigma, x)) {
        out.push(TypeWitness::I { index });
    }
    let accept_ii = |s: f64| {
        let rest = total - s;
        lt(0.5 - sigma, s) && le(s, rest) && lt(rest, 0.5 + sigma)
    };
    if let Some(s) = least_subset(t, &accept_ii) {
        let t_set = complement(&s, t.len());
        out.push(TypeWitness::II { s, t: t_set });
    }
    let accept_iii = |v: [f64; 3]| {
        le(2.0 * sigma, v[0]) && le(v[2], 0.5 - sigma) && le(0.5 + sigma, v[0] + v[1])
    };
    if let Some(triple) = least_triple(t, &accept_iii) {
        out.push(TypeWitness::III { triple });
    }
    Ok(out)
}

/// Ten dyadic sizes `D_1..D_10`; the last five carry the Möbius variables.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicTuple {
    pub d: [f64; 10],
    pub x1: f64,
    pub y1: f64,
    pub eps1: f64,
    /// Upper bound `VΘ` for `D_6..D_10`.
    pub v_cap: f64,
}

impl DyadicTuple {
    pub fn validate(&self) -> Result<(), DecompError> {
        if !(self.x1 > 1.0 && self.y1 >= self.x1) {
            return Err(DecompError::InvalidTuple("need 1 < X1 <= Y1"));
        }
        if !(self.eps1 >= 0.0 && self.eps1 < 0.1) {
            return Err(DecompError::InvalidTuple("eps1 must lie in [0, 1/10)"));
        }
        if self.d.iter().any(|&x| !(x >= 1.0)) {
            return Err(DecompError::InvalidTuple("every D_i must be at least 1"));
        }
        let prod: f64 = self.d.iter().product();
        if prod < self.x1 * (1.0 - SLACK) || prod > self.y1 * (1.0 + SLACK) {
            return Err(DecompError::InvalidTuple(
                "product of D_i must lie in [X1, Y1]",
            ));
        }
        if self.d[5..].iter().any(|&x| x > self.v_cap * (1.0 + SLACK)) {
            return Err(DecompError::InvalidTuple("D_6..D_10 must not exceed VΘ"));
        }
        Ok(())
    }

    /// `log D_i / log X_1`.
    pub fn exponents(&self) -> [f64; 10] {
        let l = libm::log(self.x1);
        self.d.map(|x| libm::log(x) / l)
    }
}

/// Type I/II/III conditions on a dyadic tuple, compared in the exponent
/// scale `log D / log X_1`.
pub fn classify_dyadic(dt: &DyadicTuple) -> Result<Vec<TypeWitness>, DecompError> {
    dt.validate()?;
    let e = dt.exponents();
    let eps = dt.eps1;
    let mut out = Vec::new();
    if let Some(index) = e[..5].iter().position(|&x| le(0.6 + eps, x)) {
        out.push(TypeWitness::I { index });
    }
    let accept_ii = |s: f64| lt(0.4 - eps, s) && lt(s, 0.6 + eps);
    if let Some(s) = least_subset(&e, &accept_ii) {
        let t = complement(&s, 10);
        out.push(TypeWitness::II { s, t });
    }
    let accept_iii = |v: [f64; 3]| {
        le(0.2 + 2.0 * eps, v[0]) && le(v[2], 0.4 - eps) && le(0.6 + eps, v[0] + v[1])
    };
    if let Some(triple) = least_triple(&e[..5], &accept_iii) {
        out.push(TypeWitness::III { triple });
    }
    Ok(out)
}
