use alloc::vec::Vec;
use num_complex::Complex64;

use super::{Lemma2Input, Method, OscError, OscIntegralResult, PhaseModel, WindowModel};
use crate::summation::CompensatedSum;

const GL_ORDER: usize = 15;
/// Largest phase change, in turns, allowed across one initial panel.
pub const OSCILLATION_BUDGET: f64 = 0.5;
pub const MAX_DEPTH: u32 = 40;
pub const MAX_PANELS: usize = 1 << 20;
pub const MIN_TOL: f64 = 1e-12;
// Refinement stops once halves disagree by less than this multiple of the
// panel's absolute mass, weighted by the size of the phase; below that the
// comparison only sees rounding.
const ROUNDOFF: f64 = 1e3 * f64::EPSILON;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre() -> [(f64, f64); GL_ORDER] {
    let n = GL_ORDER;
    let mut out = [(0.0, 0.0); GL_ORDER];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
    }
    out
}

struct Integrand<'a> {
    w: &'a dyn WindowModel,
    g: &'a PhaseModel,
    rule: [(f64, f64); GL_ORDER],
}

impl Integrand<'_> {
    /// The rule on `[a, b]`, and the same rule applied to `|w| max(1, |g|)`:
    /// `e(g)` carries an absolute phase error proportional to `|g|`.
    fn panel(&self, a: f64, b: f64) -> (Complex64, f64) {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        for &(x, wt) in &self.rule {
            let t = mid + half * x;
            let a = self.w.eval(t);
            if a == 0.0 {
                continue;
            }
            let g = self.g.value(t);
            acc += crate::e(g) * (a * wt);
            mass += a.abs() * g.abs().max(1.0) * wt;
        }
        (acc * half, mass * half)
    }
}

fn initial_panels(
    w: &dyn WindowModel,
    g: &PhaseModel,
    a: f64,
    b: f64,
) -> Result<Vec<(f64, f64)>, OscError> {
    let mut cuts: Vec<f64> = alloc::vec![a, b];
    cuts.extend(w.breakpoints().into_iter().filter(|&c| c > a && c < b));
    cuts.extend(g.critical_points(a, b));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut panels = Vec::new();
    for pair in cuts.windows(2) {
        let (c, d) = (pair[0], pair[1]);
        let len = d - c;
        let slope = [c, 0.5 * (c + d), d]
            .iter()
            .map(|&t| g.derivative(1, t).abs())
            .fold(0.0, f64::max);
        let var = (g.value(d) - g.value(c)).abs().max(slope * len);
        let pieces = libm::ceil(var / OSCILLATION_BUDGET).max(1.0);
        if !pieces.is_finite() || panels.len() as f64 + pieces > MAX_PANELS as f64 {
            return Err(OscError::TooManyPanels(MAX_PANELS));
        }
        let pieces = pieces as usize;
        for i in 0..pieces {
            let lo = c + len * i as f64 / pieces as f64;
            let hi = if i + 1 == pieces {
                d
            } else {
                c + len * (i + 1) as f64 / pieces as f64
            };
            panels.push((lo, hi));
        }
    }
    Ok(panels)
}

/// `∫_J w(t) e(g(t)) dt` by adaptive 15-point Gauss-Legendre panels.
///
/// `tol` is an absolute tolerance shared across `J` in proportion to panel
/// length. Panels are cut at window breakpoints and stationary points and
/// limited to half a turn of phase before refinement starts.
pub fn quad_osc(
    w: &dyn WindowModel,
    g: &PhaseModel,
    interval: (f64, f64),
    tol: f64,
) -> Result<OscIntegralResult, OscError> {
    if !(tol >= MIN_TOL) {
        return Err(OscError::InvalidArgument(
            "tolerance must be at least 1e-12",
        ));
    }
    let (s0, s1) = w.support();
    let (a, b) = (interval.0.max(s0), interval.1.min(s1));
    if !(interval.0 < interval.1) || !a.is_finite() || !b.is_finite() {
        return Err(OscError::InvalidArgument(
            "need a finite interval with lo < hi",
        ));
    }
    if a >= b {
        return Ok(OscIntegralResult {
            value: Complex64::new(0.0, 0.0),
            method: Method::Quadrature,
            error_estimate: 0.0,
            terms_used: 0,
        });
    }
    let f = Integrand {
        w,
        g,
        rule: gauss_legendre(),
    };
    let total = b - a;
    let mut acc = CompensatedSum::new();
    let mut error = 0.0;
    let mut converged = true;
    let mut used = 0;
    let mut stack = Vec::new();
    for (c, d) in initial_panels(w, g, a, b)? {
        stack.push((c, d, f.panel(c, d).0, 0u32));
        while let Some((c, d, whole, depth)) = stack.pop() {
            let m = 0.5 * (c + d);
            let ((l, lm), (r, rm)) = (f.panel(c, m), f.panel(m, d));
            let diff = (l + r - whole).norm();
            let share = (tol * (d - c) / total).max(ROUNDOFF * (lm + rm));
            if diff <= share || depth >= MAX_DEPTH {
                converged &= diff <= share;
                acc.add(l + r);
                error += diff;
                used += 1;
            } else {
                stack.push((m, d, r, depth + 1));
                stack.push((c, m, l, depth + 1));
            }
            if used + stack.len() > MAX_PANELS {
                return Err(OscError::TooManyPanels(MAX_PANELS));
            }
        }
    }
    let value = acc.value();
    if !converged {
        return Err(OscError::NoConvergence { value, error });
    }
    Ok(OscIntegralResult {
        value,
        method: Method::Quadrature,
        error_estimate: error,
        terms_used: used,
    })
}

/// The non-stationary bound for `∫ w e(g)` with the inputs read off the
/// integrand: `X_I = max |w|`, `V_I` the window scale, `Y_I = max |g''|`,
/// `Q_I = 1`, `R_I = min |g'|`, all sampled on the support.
pub fn lemma2_estimate(
    w: &dyn WindowModel,
    g: &PhaseModel,
    a_i: f64,
) -> Result<OscIntegralResult, OscError> {
    const SAMPLES: usize = 2048;
    let (a, b) = w.support();
    let (mut x_i, mut y_i, mut r_i) = (0.0f64, 0.0f64, f64::INFINITY);
    for i in 0..=SAMPLES {
        let t = a + (b - a) * i as f64 / SAMPLES as f64;
        x_i = x_i.max(w.eval(t).abs());
        y_i = y_i.max(g.derivative(2, t).abs());
        r_i = r_i.min(g.derivative(1, t).abs());
    }
    if !(r_i > 0.0) {
        return Err(OscError::InvalidArgument(
            "phase is stationary on the support",
        ));
    }
    let input = Lemma2Input {
        x_i,
        v_i: w.scale(),
        y_i: y_i.max(1.0),
        q_i: 1.0,
        r_i,
        a_i,
        j_len: b - a,
    };
    Ok(OscIntegralResult {
        value: Complex64::new(0.0, 0.0),
        method: Method::Lemma2Bound,
        error_estimate: input.bound(),
        terms_used: 0,
    })
}
