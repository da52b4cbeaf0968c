use alloc::vec::Vec;

use super::AlphaConstants;

/// `g(t) = h (Xt)^α - Xst/(qumn)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstPhase {
    pub h: f64,
    pub x: f64,
    pub alpha: f64,
    pub q: f64,
    pub u: f64,
    pub m: f64,
    pub n: f64,
    pub s: f64,
}

impl FirstPhase {
    fn qumn(&self) -> f64 {
        self.q * self.u * self.m * self.n
    }

    fn power_linear(&self) -> (f64, f64, f64) {
        let a = self.h * libm::pow(self.x, self.alpha);
        (a, self.alpha, -self.x * self.s / self.qumn())
    }
}

/// `g̃(τ) = (1-α) h X^α τ^γ - X^(1-α) s σ τ / (α h q² u m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondPhase {
    pub h: f64,
    pub x: f64,
    pub alpha: f64,
    pub q: f64,
    pub u: f64,
    pub m: f64,
    pub s: f64,
    pub sigma: f64,
}

impl SecondPhase {
    fn gamma(&self) -> f64 {
        self.alpha / (1.0 - self.alpha)
    }

    /// `(αhq)² um / (sσ)`.
    pub fn ratio(&self) -> f64 {
        let ahq = self.alpha * self.h * self.q;
        ahq * ahq * self.u * self.m / (self.s * self.sigma)
    }

    fn power_linear(&self) -> (f64, f64, f64) {
        let a = (1.0 - self.alpha) * self.h * libm::pow(self.x, self.alpha);
        let b = libm::pow(self.x, 1.0 - self.alpha) * self.s * self.sigma
            / (self.alpha * self.h * self.q * self.q * self.u * self.m);
        (a, self.gamma(), -b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseKind {
    FirstPoisson,
    SecondPoisson,
    Generic,
}

/// A phase `g` together with enough structure to locate its stationary
/// points in closed form where one exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseModel {
    FirstPoisson(FirstPhase),
    SecondPoisson(SecondPhase),
    /// `Σ c_k t^k`, degree at most 4.
    Polynomial([f64; 5]),
    /// `a t^p + b t` on `t > 0`.
    PowerLinear {
        a: f64,
        p: f64,
        b: f64,
    },
}

/// Falling factorial `(p)_j = p (p-1) ... (p-j+1)`.
fn falling(p: f64, j: usize) -> f64 {
    (0..j).map(|i| p - i as f64).product()
}

impl PhaseModel {
    /// `-Y (t - t₀)² / 2`.
    pub fn gaussian(y: f64, t0: f64) -> Self {
        PhaseModel::Polynomial([-0.5 * y * t0 * t0, y * t0, -0.5 * y, 0.0, 0.0])
    }

    pub fn linear(slope: f64) -> Self {
        PhaseModel::Polynomial([0.0, slope, 0.0, 0.0, 0.0])
    }

    pub fn kind(&self) -> PhaseKind {
        match self {
            PhaseModel::FirstPoisson(_) => PhaseKind::FirstPoisson,
            PhaseModel::SecondPoisson(_) => PhaseKind::SecondPoisson,
            _ => PhaseKind::Generic,
        }
    }

    fn as_power_linear(&self) -> Option<(f64, f64, f64)> {
        match *self {
            PhaseModel::FirstPoisson(f) => Some(f.power_linear()),
            PhaseModel::SecondPoisson(s) => Some(s.power_linear()),
            PhaseModel::PowerLinear { a, p, b } => Some((a, p, b)),
            PhaseModel::Polynomial(_) => None,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivative(0, t)
    }

    /// `g^(j)(t)`, exact for every order.
    pub fn derivative(&self, j: usize, t: f64) -> f64 {
        match (self.as_power_linear(), self) {
            (Some((a, p, b)), _) => {
                let lin = match j {
                    0 => b * t,
                    1 => b,
                    _ => 0.0,
                };
                a * falling(p, j) * libm::pow(t, p - j as f64) + lin
            }
            (None, PhaseModel::Polynomial(c)) => {
                let mut acc = 0.0;
                for k in (j..c.len()).rev() {
                    acc = acc * t + c[k] * falling(k as f64, j);
                }
                acc
            }
            _ => unreachable!(),
        }
    }

    /// Zeros of `g'` in the open interval `(lo, hi)`, increasing.
    pub fn critical_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if let Some((a, p, b)) = self.as_power_linear() {
            if a != 0.0 && p != 0.0 && p != 1.0 {
                let r = -b / (a * p);
                if r > 0.0 {
                    let t = libm::pow(r, 1.0 / (p - 1.0));
                    if t > lo && t < hi {
                        out.push(t);
                    }
                }
            }
            return out;
        }
        // Polynomial: g' has degree <= 3, so a sign scan on a fine grid
        // followed by bisection and a Newton polish finds every simple root.
        const STEPS: usize = 512;
        let d = |t: f64| self.derivative(1, t);
        let step = (hi - lo) / STEPS as f64;
        let mut prev = (lo, d(lo));
        for i in 1..=STEPS {
            let t = if i == STEPS { hi } else { lo + i as f64 * step };
            let cur = (t, d(t));
            if cur.1 == 0.0 && i < STEPS {
                out.push(t);
            } else if prev.1 * cur.1 < 0.0 {
                let (mut a, mut b) = (prev.0, cur.0);
                let fa = prev.1;
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    if d(m) * fa > 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                let mut r = 0.5 * (a + b);
                for _ in 0..3 {
                    let g2 = self.derivative(2, r);
                    if g2 == 0.0 {
                        break;
                    }
                    let next = r - d(r) / g2;
                    if next > prev.0 && next < cur.0 {
                        r = next;
                    }
                }
                out.push(r);
            }
            prev = cur;
        }
        out
    }

    /// Closed-form stationary point, if the model has one.
    pub(crate) fn closed_form_stationary(&self) -> Option<Option<f64>> {
        match *self {
            PhaseModel::FirstPoisson(f) => {
                if !(f.s > 0.0 && f.h > 0.0) {
                    return Some(None);
                }
                let d = 1.0 / (1.0 - f.alpha);
                Some(Some(libm::pow(f.alpha * f.h * f.qumn() / f.s, d) / f.x))
            }
            PhaseModel::SecondPoisson(s) => {
                if !(s.s * s.sigma > 0.0 && s.h > 0.0) {
                    return Some(None);
                }
                let xi = (1.0 - s.alpha) / (1.0 - 2.0 * s.alpha);
                Some(Some(
                    libm::pow(s.ratio(), xi) / libm::pow(s.x, 1.0 - s.alpha),
                ))
            }
            _ => None,
        }
    }

    /// Closed forms of `(g(t₀), g''(t₀))` where available.
    pub(crate) fn closed_form_values(&self) -> Option<(f64, f64)> {
        match *self {
            PhaseModel::FirstPoisson(f) => {
                let k = AlphaConstants::new(f.alpha).ok()?;
                let a = f.alpha;
                let value = (1.0 - a)
                    * libm::pow(libm::pow(a, a) * f.h, k.delta)
                    * libm::pow(f.qumn() / f.s, k.gamma);
                let second = -a
                    * (1.0 - a)
                    * f.h
                    * f.x
                    * f.x
                    * libm::pow(f.s / (a * f.h * f.qumn()), k.beta);
                Some((value, second))
            }
            PhaseModel::SecondPoisson(s) => {
                let k = AlphaConstants::new(s.alpha).ok()?;
                let a = s.alpha;
                let value = (1.0 - 2.0 * a) * s.h * libm::pow(s.ratio(), k.eta);
                let second = -(a * (1.0 - 2.0 * a) / (1.0 - a))
                    * s.h
                    * libm::pow(s.x, 2.0 * (1.0 - a))
                    * libm::pow(1.0 / s.ratio(), k.omega);
                Some((value, second))
            }
            _ => None,
        }
    }
}
