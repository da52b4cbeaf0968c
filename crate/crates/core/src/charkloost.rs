//! Dirichlet characters, Gauss sums `τ(χ; s) = Σ_{l=1}^{q-1} χ(l) e(sl/q)`
//! and Kloosterman sums `S_q(u, v) = Σ_{(l,q)=1} e((ul + v l*)/q)`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use thiserror::Error;

use crate::arith::{self, ArithError, FactoredInteger};
use crate::phase;
use crate::summation::CompensatedSum;

/// Largest modulus for which a character table is built.
pub const MAX_CHARACTER_MODULUS: u64 = 100_000;
/// Largest modulus accepted by the Kloosterman kernel.
pub const MAX_KLOOSTERMAN_MODULUS: u64 = 10_000_000;
/// Tolerance on the Weil margin before it counts as a violation.
pub const WEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("modulus {q} exceeds the table budget {max}")]
    TooLarge { q: u64, max: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("Weil bound violated for S_{q}({u}, {v}): margin {margin:e}")]
    WeilViolation { q: u64, u: i64, v: i64, margin: f64 },
}

/// One cyclic factor of `(Z/qZ)^*`, given as a generator of the unit group
/// of a prime-power component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Generator {
    pub modulus: u64,
    pub generator: u64,
    pub order: u64,
}

#[derive(Debug, Clone, PartialEq)]
struct Component {
    p: u64,
    e: u32,
    modulus: u64,
    /// Range of indices into `CharacterTable::generators`.
    first: usize,
    count: usize,
    /// `dlog[r * count + j]` is the exponent of generator `j` in `r`;
    /// `u32::MAX` for non-units.
    dlog: Vec<u32>,
}

/// All Dirichlet characters modulo `q`.
///
/// Character `k` has exponent vector given by the mixed-radix digits of `k`
/// over the generator orders; index 0 is the principal character.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    q: u64,
    factorization: FactoredInteger,
    generators: Vec<Generator>,
    components: Vec<Component>,
    phi: u64,
    /// Exponent of the group; values are `L`-th roots of unity.
    exponent: u64,
    roots: Vec<Complex64>,
    additive: Vec<Complex64>,
}

fn roots_of_unity(n: u64) -> Vec<Complex64> {
    (0..n)
        .map(|k| phase::unit_from_turns(k as f64 / n as f64))
        .collect()
}

fn lcm(a: u64, b: u64) -> u64 {
    a / arith::gcd(a, b) * b
}

fn build_component(p: u64, e: u32, first: usize) -> Result<(Component, Vec<Generator>), CharError> {
    let m = p.pow(e);
    let mut gens = Vec::new();
    if p != 2 {
        let g = arith::primitive_root(p, e)?;
        gens.push(Generator {
            modulus: m,
            generator: g,
            order: m / p * (p - 1),
        });
    } else if e == 2 {
        gens.push(Generator {
            modulus: 4,
            generator: 3,
            order: 2,
        });
    } else if e >= 3 {
        gens.push(Generator {
            modulus: m,
            generator: m - 1,
            order: 2,
        });
        gens.push(Generator {
            modulus: m,
            generator: 5,
            order: m >> 2,
        });
    }
    let count = gens.len();
    let mut dlog = vec![u32::MAX; (m as usize) * count.max(1)];
    match count {
        0 => dlog[1] = 0,
        1 => {
            let mut x = 1u64;
            for i in 0..gens[0].order {
                dlog[x as usize] = i as u32;
                x = x * gens[0].generator % m;
            }
        }
        _ => {
            // n = (-1)^a 5^b mod 2^e.
            for a in 0..2u64 {
                let mut x = if a == 0 { 1 } else { m - 1 };
                for b in 0..gens[1].order {
                    dlog[x as usize * 2] = a as u32;
                    dlog[x as usize * 2 + 1] = b as u32;
                    x = x * 5 % m;
                }
            }
        }
    }
    Ok((
        Component {
            p,
            e,
            modulus: m,
            first,
            count,
            dlog,
        },
        gens,
    ))
}

impl CharacterTable {
    pub fn new(q: u64) -> Result<Self, CharError> {
        if q < 3 {
            return Err(CharError::InvalidArgument("character tables need q >= 3"));
        }
        if q > MAX_CHARACTER_MODULUS {
            return Err(CharError::TooLarge {
                q,
                max: MAX_CHARACTER_MODULUS,
            });
        }
        let factorization = arith::factor(q)?;
        let mut generators = Vec::new();
        let mut components = Vec::new();
        for &(p, e) in &factorization.factors {
            let (c, g) = build_component(p, e, generators.len())?;
            generators.extend(g);
            components.push(c);
        }
        let phi = generators.iter().map(|g| g.order).product();
        let exponent = generators.iter().fold(1, |l, g| lcm(l, g.order));
        Ok(CharacterTable {
            q,
            factorization,
            generators,
            components,
            phi,
            exponent,
            roots: roots_of_unity(exponent),
            additive: roots_of_unity(q),
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn factorization(&self) -> &FactoredInteger {
        &self.factorization
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// `φ(q)`, the number of characters.
    pub fn len(&self) -> usize {
        self.phi as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exponent vector of character `index`. Panics if `index >= φ(q)`.
    pub fn exponents(&self, index: usize) -> Vec<u64> {
        assert!(
            (index as u64) < self.phi,
            "character index {index} out of range"
        );
        let mut rest = index as u64;
        self.generators
            .iter()
            .map(|g| {
                let k = rest % g.order;
                rest /= g.order;
                k
            })
            .collect()
    }

    pub fn character(&self, index: usize) -> Character<'_> {
        let exps = self.exponents(index);
        let weights = exps
            .iter()
            .zip(&self.generators)
            .map(|(&k, g)| k * (self.exponent / g.order) % self.exponent)
            .collect();
        Character {
            table: self,
            index,
            weights,
        }
    }

    /// Discrete logs of `n` over every generator, or `None` if `(n, q) > 1`.
    pub fn dlog(&self, n: u64) -> Option<Vec<u64>> {
        let mut out = vec![0; self.generators.len()];
        for c in &self.components {
            let r = (n % c.modulus) as usize;
            if r as u64 % c.p == 0 {
                return None;
            }
            for j in 0..c.count {
                out[c.first + j] = c.dlog[r * c.count + j] as u64;
            }
        }
        Some(out)
    }

    /// `e(k/q)`.
    #[inline]
    pub fn additive(&self, k: u64) -> Complex64 {
        self.additive[(k % self.q) as usize]
    }
}

/// A character together with its precomputed exponent weights.
#[derive(Debug, Clone)]
pub struct Character<'a> {
    table: &'a CharacterTable,
    index: usize,
    /// `k_j · L / ord_j mod L`.
    weights: Vec<u64>,
}

impl Character<'_> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// `χ(n) = e(phase / L)`, or `None` when `(n, q) > 1`.
    pub fn phase(&self, n: u64) -> Option<u64> {
        let t = self.table;
        let mut acc = 0u64;
        for c in &t.components {
            let r = (n % c.modulus) as usize;
            if r as u64 % c.p == 0 {
                return None;
            }
            for j in 0..c.count {
                acc += self.weights[c.first + j] * c.dlog[r * c.count + j] as u64 % t.exponent;
            }
        }
        Some(acc % t.exponent)
    }

    pub fn eval(&self, n: u64) -> Complex64 {
        match self.phase(n) {
            Some(k) => self.table.roots[k as usize],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Evaluation at a possibly negative integer.
    pub fn eval_i64(&self, n: i64) -> Complex64 {
        self.eval(n.rem_euclid(self.table.q as i64) as u64)
    }

    /// Whether the conductor equals `q`.
    pub fn is_primitive(&self) -> bool {
        let t = self.table;
        let exps = t.exponents(self.index);
        t.components.iter().all(|c| {
            let k = &exps[c.first..c.first + c.count];
            match (c.p, c.e) {
                (2, 1) => false,
                (2, 2) => k[0] == 1,
                (2, _) => k[1] % 2 == 1,
                (_, 1) => k[0] != 0,
                (p, _) => k[0] % p != 0,
            }
        })
    }

    /// `τ(χ; s) = Σ_{l=1}^{q-1} χ(l) e(sl/q)`.
    pub fn gauss_sum(&self, s: i64) -> Complex64 {
        let q = self.table.q;
        let s = s.rem_euclid(q as i64) as u64;
        let mut acc = CompensatedSum::new();
        let mut k = 0u64;
        for l in 1..q {
            k += s;
            if k >= q {
                k -= q;
            }
            if let Some(ph) = self.phase(l) {
                acc.add(self.table.roots[ph as usize] * self.table.additive[k as usize]);
            }
        }
        acc.value()
    }
}

/// `χ(n)` for character `index` of `table`.
pub fn chi_eval(table: &CharacterTable, index: usize, n: i64) -> Complex64 {
    table.character(index).eval_i64(n)
}

/// `τ(χ; s)` for character `index` of `table`.
pub fn gauss_sum(table: &CharacterTable, index: usize, s: i64) -> Complex64 {
    table.character(index).gauss_sum(s)
}

/// `(1/φ(q)) Σ_χ χ(m) conj(χ(a))`.
pub fn orthogonality_project(table: &CharacterTable, a: i64, m: i64) -> Result<f64, CharError> {
    let q = table.q;
    let ar = a.rem_euclid(q as i64) as u64;
    if arith::gcd(ar, q) != 1 {
        return Err(CharError::InvalidArgument("a must be coprime to q"));
    }
    let mr = m.rem_euclid(q as i64) as u64;
    let mut acc = CompensatedSum::new();
    for i in 0..table.len() {
        let chi = table.character(i);
        acc.add(chi.eval(mr) * chi.eval(ar).conj());
    }
    Ok(acc.value().re / table.phi as f64)
}

/// `(1/φ(q)) Σ_χ χ(mu a*) τ(χ; s) τ(χ; σ)`, which should equal
/// `S_q(s, σ a (mu)*)` when `(amu, q) = 1`.
pub fn character_average(
    table: &CharacterTable,
    mu: u64,
    a: u64,
    s: i64,
    sigma: i64,
) -> Result<Complex64, CharError> {
    let q = table.q;
    let a_inv = arith::inv_mod(a, q)?;
    let arg = arith::mul_mod(mu % q, a_inv, q);
    arith::inv_mod(arg, q)?;
    let mut acc = CompensatedSum::new();
    for i in 0..table.len() {
        let chi = table.character(i);
        acc.add(chi.eval(arg) * chi.gauss_sum(s) * chi.gauss_sum(sigma));
    }
    Ok(acc.value() / table.phi as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KloostermanValue {
    pub q: u64,
    pub u: i64,
    pub v: i64,
    pub value: f64,
    /// `|Im S_q(u, v)|` as computed.
    pub imag_residual: f64,
    /// `τ(q) √q gcd(u, v, q)^(1/2)`.
    pub weil_bound: f64,
}

impl KloostermanValue {
    pub fn margin(&self) -> f64 {
        self.weil_bound - self.value.abs()
    }
}

/// Units, their inverses and the additive characters mod `q`, reused across
/// many `(u, v)`.
#[derive(Debug, Clone)]
pub struct KloostermanKernel {
    q: u64,
    tau: u64,
    units: Vec<u64>,
    inverses: Vec<u64>,
    roots: Vec<Complex64>,
}

impl KloostermanKernel {
    pub fn new(q: u64) -> Result<Self, CharError> {
        if q < 2 {
            return Err(CharError::InvalidArgument("Kloosterman sums need q >= 2"));
        }
        if q > MAX_KLOOSTERMAN_MODULUS {
            return Err(CharError::TooLarge {
                q,
                max: MAX_KLOOSTERMAN_MODULUS,
            });
        }
        let f = arith::factor(q)?;
        let units: Vec<u64> = (1..q).filter(|&l| f.primes().all(|p| l % p != 0)).collect();
        // Batch inversion: one extended gcd, then back-substitution.
        let mut prefix = Vec::with_capacity(units.len());
        let mut acc = 1u64;
        for &l in &units {
            acc = arith::mul_mod(acc, l, q);
            prefix.push(acc);
        }
        let mut inv = arith::inv_mod(acc, q)?;
        let mut inverses = vec![0; units.len()];
        for i in (0..units.len()).rev() {
            let before = if i == 0 { 1 } else { prefix[i - 1] };
            inverses[i] = arith::mul_mod(inv, before, q);
            inv = arith::mul_mod(inv, units[i], q);
        }
        let tau = f.factors.iter().map(|&(_, e)| e as u64 + 1).product();
        Ok(KloostermanKernel {
            q,
            tau,
            units,
            inverses,
            roots: roots_of_unity(q),
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `l*` for every unit `l`, in increasing order of `l`.
    pub fn unit_pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.units
            .iter()
            .copied()
            .zip(self.inverses.iter().copied())
    }

    pub fn weil_bound(&self, u: i64, v: i64) -> f64 {
        let q = self.q;
        let g = arith::gcd(
            arith::gcd(u.rem_euclid(q as i64) as u64, v.rem_euclid(q as i64) as u64),
            q,
        );
        self.tau as f64 * libm::sqrt(q as f64) * libm::sqrt(g as f64)
    }

    pub fn eval(&self, u: i64, v: i64) -> KloostermanValue {
        let q = self.q;
        let (ur, vr) = (u.rem_euclid(q as i64) as u64, v.rem_euclid(q as i64) as u64);
        let (mut re, mut im) = (0.0, 0.0);
        for (&l, &li) in self.units.iter().zip(&self.inverses) {
            let k = ((ur as u128 * l as u128 + vr as u128 * li as u128) % q as u128) as usize;
            re += self.roots[k].re;
            im += self.roots[k].im;
        }
        KloostermanValue {
            q,
            u,
            v,
            value: re,
            imag_residual: im.abs(),
            weil_bound: self.weil_bound(u, v),
        }
    }
}

/// `S_q(u, v)`, evaluated directly.
pub fn kloosterman(q: u64, u: i64, v: i64) -> Result<KloostermanValue, CharError> {
    Ok(KloostermanKernel::new(q)?.eval(u, v))
}

/// `τ(q)√q (u,v,q)^(1/2) - |S_q(u, v)|`; a margin below `-WEIL_SLACK` is
/// reported as a violation.
pub fn weil_margin(q: u64, u: i64, v: i64) -> Result<f64, CharError> {
    check_weil(&kloosterman(q, u, v)?)
}

pub fn check_weil(k: &KloostermanValue) -> Result<f64, CharError> {
    let margin = k.margin();
    if margin < -WEIL_SLACK {
        return Err(CharError::WeilViolation {
            q: k.q,
            u: k.u,
            v: k.v,
            margin,
        });
    }
    Ok(margin)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn mod_five() {
        let t = CharacterTable::new(5).unwrap();
        assert_eq!(t.len(), 4);
        let i = Complex64::new(0.0, 1.0);
        let quartic: Vec<_> = (0..4)
            .filter(|&k| {
                let v = chi_eval(&t, k, 2);
                close(v, i, 1e-15) || close(v, -i, 1e-15)
            })
            .collect();
        assert_eq!(quartic.len(), 2);
        for n in 0..10 {
            let want = if n % 5 == 0 { 0.0 } else { 1.0 };
            assert_eq!(chi_eval(&t, 0, n), Complex64::new(want, 0.0));
        }
    }

    #[test]
    fn mod_eight_structure() {
        let t = CharacterTable::new(8).unwrap();
        assert_eq!(t.len(), 4);
        let g: Vec<_> = t
            .generators()
            .iter()
            .map(|g| (g.generator, g.order))
            .collect();
        assert_eq!(g, [(7, 2), (5, 2)]);
        for k in 0..4 {
            for n in [1u64, 3, 5, 7] {
                let v = t.character(k).eval(n);
                assert!(close(v * v, Complex64::new(1.0, 0.0), 1e-15));
            }
            assert_eq!(t.character(k).eval(6), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let t = CharacterTable::new(7).unwrap();
        for k in 1..t.len() {
            let chi = t.character(k);
            assert!(chi.is_primitive());
            assert!((chi.gauss_sum(1).norm() - libm::sqrt(7.0)).abs() < 1e-9);
            for s in 1..7 {
                let want = chi.eval(s).conj() * chi.gauss_sum(1);
                assert!(close(chi.gauss_sum(s as i64), want, 1e-9));
            }
        }
        assert!(close(gauss_sum(&t, 0, 3), Complex64::new(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn kloosterman_examples() {
        assert!((kloosterman(3, 1, 1).unwrap().value + 1.0).abs() < 1e-12);
        assert!((kloosterman(5, 0, 1).unwrap().value + 1.0).abs() < 1e-12);
        let m = weil_margin(7, 1, 1).unwrap();
        let s = kloosterman(7, 1, 1).unwrap().value;
        assert!((m - (2.0 * libm::sqrt(7.0) - s.abs())).abs() < 1e-12 && m > 0.0);
        let z = kloosterman(11, 0, 0).unwrap();
        assert_eq!(z.value, 10.0);
        assert!(z.margin() >= 0.0);
    }

    #[test]
    fn orthogonality_examples() {
        let t5 = CharacterTable::new(5).unwrap();
        assert!((orthogonality_project(&t5, 2, 2).unwrap() - 1.0).abs() < 1e-10);
        assert!(orthogonality_project(&t5, 2, 3).unwrap().abs() < 1e-10);
        let t12 = CharacterTable::new(12).unwrap();
        assert!(orthogonality_project(&t12, 5, 7).unwrap().abs() < 1e-10);
        assert!(orthogonality_project(&t12, 4, 7).is_err());
    }

    #[test]
    fn table_limits() {
        assert!(matches!(
            CharacterTable::new(100_001),
            Err(CharError::TooLarge { .. })
        ));
        assert!(CharacterTable::new(2).is_err());
    }
}
