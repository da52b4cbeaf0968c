use alloc::vec::Vec;
use num_complex::Complex64;

use super::windows::{FirstPoissonWindow, NAmplitude, Rescaled};
use super::{
    quad_osc, truncation_windows, AlphaConstants, FirstPhase, Lemma2Input, OscError, PhaseModel,
    SecondPhase, TruncationParams, TruncationWindows, WindowModel,
};
use crate::charkloost::CharacterTable;
use crate::phase;
use crate::smoothing::{BumpWindow, DyadicPartition};
use crate::summation::CompensatedSum;

/// Hard cap on the dual frequency when the cutoff is chosen adaptively.
pub const S_CAP: u64 = 10_000;
const QUIET_LEVELS: usize = 2;
const MAX_MODULUS: u64 = 50;
const MAX_TERMS: u64 = 10_000;

/// Both sides of one Poisson step. `diff` is `|lhs - rhs|` divided by the
/// `l1_mass` `Σ |term|` of the direct side.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// Dual frequencies inside the stationary window.
    pub main: Complex64,
    pub main_count: usize,
    pub tail: Complex64,
    pub l1_mass: f64,
    pub diff: f64,
    /// Largest dual frequency used.
    pub cutoff: u64,
    /// Size of the last dual levels evaluated, an estimate of what was cut.
    pub tail_estimate: f64,
    /// Non-stationary bound (constant 1) on everything beyond the cutoff.
    pub lemma2_tail: f64,
    /// Accumulated quadrature error estimates, weighted like the terms.
    pub quad_error: f64,
    pub windows: TruncationWindows,
    /// Second step only: `|rhs in x - rhs in τ| / l1_mass`.
    pub jacobian_diff: Option<f64>,
}

struct DualSum {
    main: CompensatedSum,
    tail: CompensatedSum,
    alt: CompensatedSum,
    main_count: usize,
    quad_error: f64,
    cutoff: u64,
    tail_estimate: f64,
}

struct DualTerm {
    value: Complex64,
    alt: Complex64,
    quad_error: f64,
}

/// Sums the dual terms level by level (`0`, then `±1`, `±2`, ...). Without
/// an explicit cutoff, stops after `QUIET_LEVELS` consecutive levels below
/// `quiet`; with one, fails if the last levels exceed `tol_abs`.
fn dual_sum(
    term: &mut dyn FnMut(i64) -> Result<DualTerm, OscError>,
    in_main: &dyn Fn(i64) -> bool,
    cutoff: Option<u64>,
    quiet: f64,
    tol_abs: f64,
) -> Result<DualSum, OscError> {
    let mut d = DualSum {
        main: CompensatedSum::new(),
        tail: CompensatedSum::new(),
        alt: CompensatedSum::new(),
        main_count: 0,
        quad_error: 0.0,
        cutoff: 0,
        tail_estimate: 0.0,
    };
    let mut recent = [f64::INFINITY; QUIET_LEVELS];
    let limit = cutoff.unwrap_or(S_CAP);
    for level in 0..=limit {
        let freqs: &[i64] = if level == 0 {
            &[0]
        } else {
            &[level as i64, -(level as i64)]
        };
        let mut size = 0.0;
        for &s in freqs {
            let t = term(s)?;
            if in_main(s) {
                d.main.add(t.value);
                d.main_count += 1;
            } else {
                d.tail.add(t.value);
            }
            d.alt.add(t.alt);
            d.quad_error += t.quad_error;
            size += t.value.norm();
        }
        recent.rotate_left(1);
        recent[QUIET_LEVELS - 1] = size;
        d.cutoff = level;
        d.tail_estimate = 2.0 * recent.iter().copied().fold(0.0, f64::max);
        if cutoff.is_none() && level >= 2 && recent.iter().all(|&r| r <= quiet) {
            return Ok(d);
        }
    }
    if cutoff.is_none() || d.tail_estimate > tol_abs {
        return Err(OscError::Truncation {
            cutoff: d.cutoff,
            bound: d.tail_estimate,
        });
    }
    Ok(d)
}

fn gauss_table(table: &CharacterTable, chi: usize) -> Vec<Complex64> {
    let c = table.character(chi);
    (0..table.q()).map(|s| c.gauss_sum(s as i64)).collect()
}

fn gauss_at(sums: &[Complex64], s: i64) -> Complex64 {
    sums[s.rem_euclid(sums.len() as i64) as usize]
}

// Absolute tolerance for an integral entering the sum with weight `scale`.
fn int_tol(target: f64, scale: f64) -> f64 {
    (target / scale).max(super::MIN_TOL)
}

// Σ_{s > S} s^{-A} <= (S+1)^{-A} (1 + (S+1)/(A-1)).
fn power_tail(first: f64, a: f64) -> f64 {
    libm::pow(first, -a) * (1.0 + first / (a - 1.0))
}

fn check_common(
    table: &CharacterTable,
    chi: usize,
    tol: f64,
    quad_tol: f64,
    a_i: f64,
) -> Result<(), OscError> {
    if table.q() > MAX_MODULUS {
        return Err(OscError::InvalidArgument(
            "verification is limited to q <= 50",
        ));
    }
    if chi >= table.len() {
        return Err(OscError::InvalidArgument("character index out of range"));
    }
    if !(tol > 0.0) || !(quad_tol > 0.0) || !(a_i > 1.0) {
        return Err(OscError::InvalidArgument(
            "need tol > 0, quad_tol > 0 and A_I > 1",
        ));
    }
    Ok(())
}

/// The first Poisson step over `k`:
/// `Σ_k χ(k) w(umnk/X) e(h(umnk)^α) = (X/(qumn)) Σ_s τ(χ; s) I(s)` with
/// `I(s) = ∫ w(t) e(h(Xt)^α - Xst/(qumn)) dt`.
#[derive(Debug, Clone)]
pub struct FirstPoissonCase {
    pub table: CharacterTable,
    pub chi: usize,
    pub u: u64,
    pub m: u64,
    pub n: u64,
    pub h: f64,
    pub alpha: f64,
    pub x: f64,
    pub window: BumpWindow,
    pub partition: DyadicPartition,
    pub k_index: u32,
    pub f_log: bool,
    /// Fixed cutoff for `|s|`; adaptive when `None`.
    pub s_max: Option<u64>,
    /// Target for the truncated dual tail, relative to the l1 mass.
    pub tol: f64,
    /// Quadrature tolerance per dual term, relative to the l1 mass.
    pub quad_tol: f64,
    pub a_i: f64,
}

impl FirstPoissonCase {
    fn amplitude(&self) -> FirstPoissonWindow<'_> {
        FirstPoissonWindow {
            x: self.x,
            umn: (self.u * self.m * self.n) as f64,
            window: &self.window,
            partition: &self.partition,
            k_index: self.k_index,
            f_log: self.f_log,
        }
    }
}

pub fn poisson_verify_first(c: &FirstPoissonCase) -> Result<PoissonReport, OscError> {
    check_common(&c.table, c.chi, c.tol, c.quad_tol, c.a_i)?;
    AlphaConstants::new(c.alpha)?;
    if c.k_index > c.partition.grid().max_power() {
        return Err(OscError::InvalidArgument("K index beyond the grid"));
    }
    let q = c.table.q();
    let umn = c.u * c.m * c.n;
    let w = c.amplitude();
    let (k0, k1) = w.k_range();
    if k1 - k0 > MAX_TERMS {
        return Err(OscError::InvalidArgument("k range exceeds 10^4 terms"));
    }
    let chi = c.table.character(c.chi);
    let mut lhs = CompensatedSum::new();
    let mut l1 = 0.0;
    for k in k0..=k1 {
        let a = w.at_k(k as f64);
        let x = chi.eval(k);
        if a == 0.0 || x.norm() == 0.0 {
            continue;
        }
        let f = phase::frac_monomial_u64(c.h, umn * k, c.alpha, phase::DEFAULT_DD_THRESHOLD);
        lhs.add(x * phase::unit_from_turns(f) * a);
        l1 += a.abs();
    }
    let lhs = lhs.value();

    let windows = truncation_windows(&TruncationParams {
        alpha: c.alpha,
        h: c.h.abs().max(f64::MIN_POSITIVE),
        u: c.u as f64,
        m: c.m as f64,
        n_size: c.n as f64,
        q: q as f64,
        x: c.x,
        s: 1.0,
    })?;
    let gauss = gauss_table(&c.table, c.chi);
    let weight = c.x / (q * umn) as f64;
    let support = WindowModel::support(&w);
    let mut term = |s: i64| -> Result<DualTerm, OscError> {
        let tau = gauss_at(&gauss, s);
        if tau.norm() <= 1e-12 * q as f64 {
            return Ok(DualTerm {
                value: Complex64::new(0.0, 0.0),
                alt: Complex64::new(0.0, 0.0),
                quad_error: 0.0,
            });
        }
        let g = PhaseModel::FirstPoisson(FirstPhase {
            h: c.h,
            x: c.x,
            alpha: c.alpha,
            q: q as f64,
            u: c.u as f64,
            m: c.m as f64,
            n: c.n as f64,
            s: s as f64,
        });
        let r = quad_osc(
            &w,
            &g,
            support,
            int_tol(c.quad_tol * l1, weight * tau.norm()),
        )?;
        let v = tau * r.value * weight;
        Ok(DualTerm {
            value: v,
            alt: v,
            quad_error: tau.norm() * weight * r.error_estimate,
        })
    };
    let in_main = |s: i64| windows.in_first(s);
    let d = dual_sum(&mut term, &in_main, c.s_max, 1e-3 * c.tol * l1, c.tol * l1)?;

    let first = (d.cutoff + 1) as f64;
    let lemma2_tail = if first <= windows.t2 {
        f64::INFINITY
    } else {
        let max_tau = gauss.iter().map(|t| t.norm()).fold(0.0, f64::max);
        let input = Lemma2Input {
            x_i: if c.f_log {
                libm::log(k1 as f64).max(1.0)
            } else {
                1.0
            },
            v_i: w.scale(),
            y_i: (c.h.abs() * libm::pow(c.x, c.alpha)).max(1.0),
            q_i: 1.0,
            r_i: c.x / (2.0 * (q * umn) as f64),
            a_i: c.a_i,
            j_len: support.1 - support.0,
        };
        2.0 * max_tau * weight * input.bound() * power_tail(first, c.a_i)
    };
    let (main, tail) = (d.main.value(), d.tail.value());
    let rhs = main + tail;
    Ok(PoissonReport {
        lhs,
        rhs,
        main,
        main_count: d.main_count,
        tail,
        l1_mass: l1,
        diff: (lhs - rhs).norm() / l1,
        cutoff: d.cutoff,
        tail_estimate: d.tail_estimate,
        lemma2_tail,
        quad_error: d.quad_error,
        windows,
        jacobian_diff: None,
    })
}

/// The second Poisson step over `n`:
/// `Σ_n χ(n) F(n) = (1/q) Σ_σ τ(χ; σ) ∫ F(x) e(-σx/q) dx` with
/// `F(x) = f₂(x) Ψ_N(x) x^(β(ν+1/2)-1) e((1-α)(α^α h)^δ (qumx/s)^γ)`,
/// the right side evaluated after `x = sX^(1-α) τ / (αhqum)`.
#[derive(Debug, Clone)]
pub struct SecondPoissonCase {
    pub table: CharacterTable,
    pub chi: usize,
    pub u: u64,
    pub m: u64,
    /// First dual frequency, `s >= 1`.
    pub s: u64,
    pub nu: u32,
    pub h: f64,
    pub alpha: f64,
    pub x: f64,
    pub partition: DyadicPartition,
    pub n_index: u32,
    pub f_log: bool,
    pub sigma_max: Option<u64>,
    pub tol: f64,
    pub quad_tol: f64,
    pub a_i: f64,
}

pub fn poisson_verify_second(c: &SecondPoissonCase) -> Result<PoissonReport, OscError> {
    check_common(&c.table, c.chi, c.tol, c.quad_tol, c.a_i)?;
    let k = AlphaConstants::new(c.alpha)?;
    if c.s == 0 || !(c.h > 0.0) {
        return Err(OscError::InvalidArgument("need s >= 1 and h > 0"));
    }
    if c.n_index > c.partition.grid().max_power() {
        return Err(OscError::InvalidArgument("N index beyond the grid"));
    }
    let q = c.table.q();
    let (qf, uf, mf, sf) = (q as f64, c.u as f64, c.m as f64, c.s as f64);
    let amp = NAmplitude {
        partition: &c.partition,
        n_index: c.n_index,
        power: k.beta * (c.nu as f64 + 0.5) - 1.0,
        f_log: c.f_log,
    };
    let (lo, hi) = amp.support();
    let (n0, n1) = ((libm::floor(lo) as u64).max(1), libm::ceil(hi) as u64);
    if n1 - n0 > MAX_TERMS {
        return Err(OscError::InvalidArgument("n range exceeds 10^4 terms"));
    }
    // Phase coefficient of x^γ.
    let a = (1.0 - c.alpha)
        * libm::pow(libm::pow(c.alpha, c.alpha) * c.h, k.delta)
        * libm::pow(qf * uf * mf / sf, k.gamma);
    let chi = c.table.character(c.chi);
    let mut lhs = CompensatedSum::new();
    let mut l1 = 0.0;
    for n in n0..=n1 {
        let w = amp.eval(n as f64);
        let x = chi.eval(n);
        if w == 0.0 || x.norm() == 0.0 {
            continue;
        }
        lhs.add(x * crate::e(a * libm::pow(n as f64, k.gamma)) * w);
        l1 += w.abs();
    }
    let lhs = lhs.value();

    let windows = truncation_windows(&TruncationParams {
        alpha: c.alpha,
        h: c.h,
        u: uf,
        m: mf,
        n_size: c.partition.grid().get(c.n_index).unwrap(),
        q: qf,
        x: c.x,
        s: sf,
    })?;
    let jac = sf * libm::pow(c.x, 1.0 - c.alpha) / (c.alpha * c.h * qf * uf * mf);
    let amp_tau = Rescaled {
        inner: &amp,
        c: jac,
    };
    let gauss = gauss_table(&c.table, c.chi);
    let mut term = |sigma: i64| -> Result<DualTerm, OscError> {
        let tau = gauss_at(&gauss, sigma);
        if tau.norm() <= 1e-12 * qf {
            return Ok(DualTerm {
                value: Complex64::new(0.0, 0.0),
                alt: Complex64::new(0.0, 0.0),
                quad_error: 0.0,
            });
        }
        let gx = PhaseModel::PowerLinear {
            a,
            p: k.gamma,
            b: -(sigma as f64) / qf,
        };
        let rx = quad_osc(
            &amp,
            &gx,
            (lo, hi),
            int_tol(c.quad_tol * l1, tau.norm() / qf),
        )?;
        let gt = PhaseModel::SecondPoisson(SecondPhase {
            h: c.h,
            x: c.x,
            alpha: c.alpha,
            q: qf,
            u: uf,
            m: mf,
            s: sf,
            sigma: sigma as f64,
        });
        let rt = quad_osc(
            &amp_tau,
            &gt,
            amp_tau.support(),
            int_tol(c.quad_tol * l1, jac * tau.norm() / qf),
        )?;
        let wt = tau / qf;
        Ok(DualTerm {
            value: wt * rt.value * jac,
            alt: wt * rx.value,
            quad_error: wt.norm() * (rt.error_estimate * jac + rx.error_estimate),
        })
    };
    let in_main = |s: i64| windows.in_second(s);
    let d = dual_sum(
        &mut term,
        &in_main,
        c.sigma_max,
        1e-3 * c.tol * l1,
        c.tol * l1,
    )?;

    let first = (d.cutoff + 1) as f64;
    let lemma2_tail = if first < windows.t4 {
        f64::INFINITY
    } else {
        let max_tau = gauss.iter().map(|t| t.norm()).fold(0.0, f64::max);
        let (t0, t1) = amp_tau.support();
        let input = Lemma2Input {
            x_i: (0..=64)
                .map(|i| amp.eval(lo + (hi - lo) * i as f64 / 64.0).abs())
                .fold(0.0, f64::max),
            v_i: amp_tau.scale(),
            y_i: (c.h * libm::pow(c.x, c.alpha)).max(1.0),
            q_i: 1.0,
            r_i: 2.0 / 3.0 * libm::pow(c.x, 1.0 - c.alpha) * sf
                / (c.alpha * c.h * qf * qf * uf * mf),
            a_i: c.a_i,
            j_len: t1 - t0,
        };
        2.0 * max_tau / qf * jac * input.bound() * power_tail(first, c.a_i)
    };
    let (main, tail) = (d.main.value(), d.tail.value());
    let rhs = main + tail;
    Ok(PoissonReport {
        lhs,
        rhs,
        main,
        main_count: d.main_count,
        tail,
        l1_mass: l1,
        diff: (lhs - rhs).norm() / l1,
        cutoff: d.cutoff,
        tail_estimate: d.tail_estimate,
        lemma2_tail,
        quad_error: d.quad_error,
        windows,
        jacobian_diff: Some((d.alt.value() - rhs).norm() / l1),
    })
}

/// Which character of the table a grid case uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiChoice {
    Principal,
    Middle,
    Last,
}

impl ChiChoice {
    pub fn index(self, table: &CharacterTable) -> usize {
        match self {
            ChiChoice::Principal => 0,
            ChiChoice::Middle => table.len() / 2,
            ChiChoice::Last => table.len() - 1,
        }
    }
}

/// One point of the verification grid; the remaining parameters are fixed:
/// `X = 10^4`, `u = 1`, `m = 2`, `n = 3`, `ψ` with `y = 1.5`, `Δ = 0.2`,
/// `Θ = 1.25`, `K` and `N` the grid points nearest `X√y/(umn)` and 2000,
/// `s = 1`, `ν = 0`, `f = log`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCase {
    pub q: u64,
    pub alpha: f64,
    pub h: f64,
    pub chi: ChiChoice,
}

pub const GRID_X: f64 = 1e4;
const GRID_THETA: f64 = 1.25;
const GRID_MAX_POWER: u32 = 48;

/// 4 moduli × 5 variants = 20 cases.
pub fn verification_grid() -> Vec<GridCase> {
    let variants = [
        (0.05, 1.0, ChiChoice::Principal),
        (0.05, 1.0, ChiChoice::Last),
        (0.1, 1.0, ChiChoice::Principal),
        (0.1, 1.0, ChiChoice::Last),
        (0.1, 2.0, ChiChoice::Middle),
    ];
    let mut out = Vec::new();
    for q in [3, 5, 7, 12] {
        for &(alpha, h, chi) in &variants {
            out.push(GridCase { q, alpha, h, chi });
        }
    }
    out
}

fn nearest_index(theta: f64, target: f64) -> u32 {
    libm::round(libm::log(target) / libm::log(theta)) as u32
}

impl GridCase {
    pub fn first(&self) -> Result<FirstPoissonCase, OscError> {
        let table = CharacterTable::new(self.q)?;
        let chi = self.chi.index(&table);
        let window = BumpWindow::new(1.5, 0.2, 1.0)?;
        let partition = DyadicPartition::new(GRID_THETA, 1.0, GRID_MAX_POWER)?;
        let k_index = nearest_index(GRID_THETA, GRID_X * libm::sqrt(1.5) / 6.0);
        Ok(FirstPoissonCase {
            table,
            chi,
            u: 1,
            m: 2,
            n: 3,
            h: self.h,
            alpha: self.alpha,
            x: GRID_X,
            window,
            partition,
            k_index,
            f_log: true,
            s_max: None,
            tol: 1e-9,
            quad_tol: 1e-12,
            a_i: super::LargeConstants::default().a_i,
        })
    }

    pub fn second(&self) -> Result<SecondPoissonCase, OscError> {
        let table = CharacterTable::new(self.q)?;
        let chi = self.chi.index(&table);
        let partition = DyadicPartition::new(GRID_THETA, 1.0, GRID_MAX_POWER)?;
        Ok(SecondPoissonCase {
            table,
            chi,
            u: 1,
            m: 2,
            s: 1,
            nu: 0,
            h: self.h,
            alpha: self.alpha,
            x: GRID_X,
            partition,
            n_index: nearest_index(GRID_THETA, 2000.0),
            f_log: true,
            sigma_max: None,
            tol: 1e-9,
            quad_tol: 1e-12,
            a_i: super::LargeConstants::default().a_i,
        })
    }
}
