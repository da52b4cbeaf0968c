use alloc::vec::Vec;
use num_complex::Complex64;

use super::{expansion_unit, Method, OscError, OscIntegralResult, PhaseModel, WindowModel};
use crate::numdiff;

/// The expansion keeps at most this many terms; the next one needs a
/// sixth derivative, the highest the difference tables support.
pub const MAX_EXPANSION_TERMS: usize = 3;

/// The unique zero of `g'` in `interval`.
pub fn stationary_point(g: &PhaseModel, interval: (f64, f64)) -> Result<f64, OscError> {
    let (lo, hi) = interval;
    if let Some(closed) = g.closed_form_stationary() {
        return match closed {
            Some(t) if t >= lo && t <= hi => Ok(t),
            _ => Err(OscError::NotFound),
        };
    }
    let mut pts = g.critical_points(lo, hi);
    for end in [lo, hi] {
        if g.derivative(1, end) == 0.0 {
            pts.push(end);
        }
    }
    match pts.len() {
        0 => Err(OscError::NotFound),
        1 => Ok(pts[0]),
        n => Err(OscError::MultipleStationary(n)),
    }
}

/// `|g'(t₀)| / (|g''(t₀)| |t₀|)`.
pub fn stationary_residual(g: &PhaseModel, t0: f64) -> f64 {
    g.derivative(1, t0).abs() / (g.derivative(2, t0).abs() * t0.abs().max(f64::MIN_POSITIVE))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryValues {
    pub t0: f64,
    /// `g(t₀)`.
    pub value: f64,
    /// `g''(t₀)`.
    pub second: f64,
}

/// `(t₀, g(t₀), g''(t₀))`, from the closed forms where the model has them.
pub fn stationary_values(
    g: &PhaseModel,
    interval: (f64, f64),
) -> Result<StationaryValues, OscError> {
    let t0 = stationary_point(g, interval)?;
    let (value, second) = g
        .closed_form_values()
        .unwrap_or((g.value(t0), g.derivative(2, t0)));
    Ok(StationaryValues { t0, value, second })
}

/// `H(t) = g(t) - g(t₀) - g''(t₀)(t - t₀)²/2`.
pub fn h_function(g: &PhaseModel, t0: f64) -> impl Fn(f64) -> f64 {
    let g = *g;
    let (g0, g2) = (g.value(t0), g.derivative(2, t0));
    move |t| {
        let d = t - t0;
        g.value(t) - g0 - 0.5 * g2 * d * d
    }
}

// Length over which e(H) turns by O(1) near t₀.
fn phase_scale(g: &PhaseModel, t0: f64) -> f64 {
    let mut s = f64::INFINITY;
    let mut fact = 1.0;
    for k in 3..=6 {
        fact *= k as f64;
        let c = 2.0 * core::f64::consts::PI * g.derivative(k, t0).abs() / fact;
        if c > 0.0 {
            s = s.min(libm::pow(c, -1.0 / k as f64));
        }
    }
    s
}

/// `d^r/dt^r e(H(t))` at `t₀` by extrapolated central differences.
pub fn eh_derivative(g: &PhaseModel, t0: f64, r: usize, scale: f64) -> Result<Complex64, OscError> {
    let h = h_function(g, t0);
    numdiff::derivative(|t| crate::e(h(t)), t0, r, scale).ok_or(OscError::DerivativeOrder(r))
}

/// Faà di Bruno for `φ = e(·)`: given `e(H)` and `H', ..., H^(r)` at a
/// point, returns `d^r/dt^r e(H)` there.
pub fn faa_di_bruno_exp(eh: Complex64, derivs: &[f64]) -> Complex64 {
    let r = derivs.len();
    let two_pi_i = Complex64::new(0.0, 2.0 * core::f64::consts::PI);
    let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    let mut total = Complex64::new(0.0, 0.0);
    let mut m = alloc::vec![0usize; r + 1];
    // Enumerate m_1 + 2 m_2 + ... + r m_r = r, largest part first.
    fn walk(k: usize, rest: usize, m: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if k == 0 {
            if rest == 0 {
                visit(m);
            }
            return;
        }
        for count in 0..=rest / k {
            m[k] = count;
            walk(k - 1, rest - count * k, m, visit);
        }
        m[k] = 0;
    }
    let mut visit = |m: &[usize]| {
        let mut coeff = fact(r);
        let mut term = Complex64::new(1.0, 0.0);
        let mut parts = 0;
        for k in 1..=r {
            if m[k] == 0 {
                continue;
            }
            coeff /= fact(m[k]);
            term *= libm::pow(derivs[k - 1] / fact(k), m[k] as f64);
            parts += m[k];
        }
        total += term * two_pi_i.powi(parts as i32) * coeff;
    };
    walk(r, r, &mut m, &mut visit);
    total * eh
}

/// The stationary-phase expansion
/// `I ≈ e(g(t₀)) e^{-iπ/4} Σ_{n<N} (4πi)^{-n}/n! |g''(t₀)|^{-n-1/2} G^{(2n)}(t₀)`
/// with `G = w e(H)`.
///
/// Terms up to `n = 3` are computed whatever `n_terms` is. The error
/// estimate adds the sizes of the computed terms left out of the value, and
/// counts the `n = 3` term once more for the part of the series beyond the
/// sixth derivative. The terms decay slowly when `g'''` is comparable to
/// `g''`, so the first omitted term alone is not a reliable band.
pub fn stationary_expand(
    w: &dyn WindowModel,
    g: &PhaseModel,
    interval: (f64, f64),
    n_terms: usize,
) -> Result<OscIntegralResult, OscError> {
    if n_terms == 0 || n_terms > MAX_EXPANSION_TERMS {
        return Err(OscError::InvalidArgument("n_terms must lie in 1..=3"));
    }
    let crit = g.critical_points(interval.0, interval.1);
    if crit.len() > 1 {
        return Err(OscError::MultipleStationary(crit.len()));
    }
    let sv = stationary_values(g, interval)?;
    if !(sv.second < 0.0) {
        return Err(OscError::InvalidArgument(
            "expansion needs g'' < 0 at the stationary point",
        ));
    }
    let t0 = sv.t0;
    let h = h_function(g, t0);
    let big_g = |t: f64| {
        let a = w.eval(t);
        if a == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            crate::e(h(t)) * a
        }
    };
    let scale = w.scale().min(phase_scale(g, t0));
    let curvature = sv.second.abs();
    let term = |n: usize| -> Result<Complex64, OscError> {
        let d: Complex64 =
            numdiff::derivative(big_g, t0, 2 * n, scale).ok_or(OscError::DerivativeOrder(2 * n))?;
        Ok(expansion_unit(n as u32) * libm::pow(curvature, -(n as f64) - 0.5) * d)
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut omitted = 0.0;
    let mut last = 0.0;
    for n in 0..=MAX_EXPANSION_TERMS {
        let t = term(n)?;
        if n < n_terms {
            sum += t;
        } else {
            omitted += t.norm();
        }
        last = t.norm();
    }
    let lead = crate::e(sv.value);
    Ok(OscIntegralResult {
        value: lead * sum,
        method: Method::Lemma3Expansion,
        error_estimate: omitted + last,
        terms_used: n_terms,
    })
}
