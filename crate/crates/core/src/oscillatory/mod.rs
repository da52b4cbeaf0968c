//! Oscillatory integrals `I = ∫ w(t) e(g(t)) dt`: adaptive quadrature, the
//! non-stationary bound, the stationary-phase expansion, the phases that
//! arise after Poisson summation, and numerical checks of both Poisson steps.

mod phases;
mod poisson;
mod quad;
mod stationary;
mod windows;

pub use phases::{FirstPhase, PhaseKind, PhaseModel, SecondPhase};
pub use poisson::{
    poisson_verify_first, poisson_verify_second, verification_grid, ChiChoice, FirstPoissonCase,
    GridCase, PoissonReport, SecondPoissonCase, S_CAP,
};
pub use quad::{lemma2_estimate, quad_osc, MAX_DEPTH, MAX_PANELS, MIN_TOL, OSCILLATION_BUDGET};
pub use stationary::{
    eh_derivative, faa_di_bruno_exp, h_function, stationary_expand, stationary_point,
    stationary_residual, stationary_values, StationaryValues, MAX_EXPANSION_TERMS,
};
pub use windows::{CompactBump, FirstPoissonWindow, NAmplitude, Plateau, Rescaled, WindowModel};

use num_complex::Complex64;
use thiserror::Error;

use crate::charkloost::CharError;
use crate::smoothing::SmoothingError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OscError {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("no stationary point in the window")]
    NotFound,
    #[error("{0} stationary points in the window; split the integral first")]
    MultipleStationary(usize),
    #[error("quadrature did not converge (best value {value}, error {error:e})")]
    NoConvergence { value: Complex64, error: f64 },
    #[error("more than {0} quadrature panels needed")]
    TooManyPanels(usize),
    #[error("dual sum not under tolerance at cutoff {cutoff}: tail estimate {bound:e}")]
    Truncation { cutoff: u64, bound: f64 },
    #[error("derivative of order {0} not available")]
    DerivativeOrder(usize),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Smoothing(#[from] SmoothingError),
}

/// `β, γ, δ, ξ, η, ω` as functions of `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaConstants {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub xi: f64,
    pub eta: f64,
    pub omega: f64,
}

impl AlphaConstants {
    /// Requires `0 < α < 1/2`; `ξ, η, ω` blow up at `α = 1/2`.
    pub fn new(alpha: f64) -> Result<Self, OscError> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(OscError::InvalidArgument("alpha must lie in (0, 1/2)"));
        }
        let a = alpha;
        Ok(AlphaConstants {
            alpha: a,
            beta: (2.0 - a) / (1.0 - a),
            gamma: a / (1.0 - a),
            delta: 1.0 / (1.0 - a),
            xi: (1.0 - a) / (1.0 - 2.0 * a),
            eta: a / (1.0 - 2.0 * a),
            omega: (2.0 - 3.0 * a) / (1.0 - 2.0 * a),
        })
    }
}

pub fn alpha_constants(alpha: f64) -> Result<AlphaConstants, OscError> {
    AlphaConstants::new(alpha)
}

/// How an [`OscIntegralResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    Lemma2Bound,
    Lemma3Expansion,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::Lemma2Bound => "lemma2-bound",
            Method::Lemma3Expansion => "lemma3-expansion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscIntegralResult {
    pub value: Complex64,
    pub method: Method,
    pub error_estimate: f64,
    /// Panels for quadrature, expansion terms for the stationary phase.
    pub terms_used: usize,
}

/// The "sufficiently large" constants `D₀, F₀, A_I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeConstants {
    pub d0: f64,
    pub f0: f64,
    pub a_i: f64,
}

impl Default for LargeConstants {
    fn default() -> Self {
        LargeConstants {
            d0: 10.0,
            f0: 10.0,
            a_i: 8.0,
        }
    }
}

/// Inputs of the non-stationary bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Input {
    pub x_i: f64,
    pub v_i: f64,
    pub y_i: f64,
    pub q_i: f64,
    pub r_i: f64,
    pub a_i: f64,
    pub j_len: f64,
}

impl Lemma2Input {
    /// `(Δ₁, Δ₂) = (Q_I R_I / √Y_I, R_I V_I)`.
    pub fn deltas(&self) -> (f64, f64) {
        (
            self.q_i * self.r_i / libm::sqrt(self.y_i),
            self.r_i * self.v_i,
        )
    }

    /// `c · |J| X_I (Δ₁^(-A) + Δ₂^(-A))`.
    pub fn bound_with_constant(&self, c: f64) -> f64 {
        let (d1, d2) = self.deltas();
        c * self.j_len * self.x_i * (libm::pow(d1, -self.a_i) + libm::pow(d2, -self.a_i))
    }

    pub fn bound(&self) -> f64 {
        self.bound_with_constant(1.0)
    }
}

/// The non-stationary bound with implied constant 1.
#[allow(clippy::too_many_arguments)]
pub fn lemma2_bound(x_i: f64, v_i: f64, y_i: f64, q_i: f64, r_i: f64, a_i: f64, j_len: f64) -> f64 {
    Lemma2Input {
        x_i,
        v_i,
        y_i,
        q_i,
        r_i,
        a_i,
        j_len,
    }
    .bound()
}

/// Parameters of the two dual windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationParams {
    pub alpha: f64,
    pub h: f64,
    pub u: f64,
    pub m: f64,
    /// Size `N` of the `n` variable.
    pub n_size: f64,
    pub q: f64,
    pub x: f64,
    /// First dual frequency, used by `T₃, T₄`.
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWindows {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
}

impl TruncationWindows {
    /// `T₂ < 1`: no `s` in the stationary range.
    pub fn first_empty(&self) -> bool {
        self.t2 < 1.0
    }

    /// `T₄ < 1`: no `σ` in the stationary range.
    pub fn second_empty(&self) -> bool {
        self.t4 < 1.0
    }

    pub fn in_first(&self, s: i64) -> bool {
        (s as f64) > self.t1 && (s as f64) <= self.t2
    }

    pub fn in_second(&self, sigma: i64) -> bool {
        (sigma as f64) > self.t3 && (sigma as f64) < self.t4
    }
}

pub fn truncation_windows(p: &TruncationParams) -> Result<TruncationWindows, OscError> {
    let all = [p.alpha, p.h, p.u, p.m, p.n_size, p.q, p.x, p.s];
    if all.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(OscError::InvalidArgument(
            "truncation parameters must be positive",
        ));
    }
    let base = p.alpha * p.h * p.u * p.m * p.n_size * p.q / libm::pow(p.x, 1.0 - p.alpha);
    let ahq = p.alpha * p.h * p.q;
    let t3 = ahq * ahq * p.u * p.m / (4.0 * p.s * libm::pow(p.x, 1.0 - 2.0 * p.alpha));
    Ok(TruncationWindows {
        t1: base / 4.0,
        t2: 4.0 * base,
        t3,
        t4: 16.0 * t3,
    })
}

/// `ζ(3/2)`.
pub const ZETA_THREE_HALVES: f64 = 2.612_375_348_685_488;

/// `Σ_{T₁<s<T₂} Σ_{T₃<σ<T₄} (s, σ)^(1/2)` together with the estimate
/// `ζ(3/2) T₂ T₄` it is claimed to stay below.
pub fn gcd_sqrt_sum(w: &TruncationWindows) -> (f64, f64) {
    let range = |lo: f64, hi: f64| {
        let a = libm::floor(lo) as i64 + 1;
        let b = libm::ceil(hi) as i64 - 1;
        (a.max(1), b)
    };
    let (s0, s1) = range(w.t1, w.t2);
    let (r0, r1) = range(w.t3, w.t4);
    let mut total = 0.0;
    for s in s0..=s1 {
        for r in r0..=r1 {
            total += libm::sqrt(crate::arith::gcd(s as u64, r as u64) as f64);
        }
    }
    (total, ZETA_THREE_HALVES * w.t2 * w.t4)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

// e^{-iπ/4} (4πi)^{-ν} / ν!
fn expansion_unit(nu: u32) -> Complex64 {
    let four_pi_i = Complex64::new(0.0, 4.0 * core::f64::consts::PI);
    crate::e(-0.125) * four_pi_i.powi(-(nu as i32)) / factorial(nu)
}

/// `c_ν(α)` in the first-step expansion
/// `I(s) = e(g(t₀)) Σ_ν c_ν (hX²)^(-ν-1/2) (hqumn/s)^(β(ν+1/2)) G^(2ν)(t₀)`.
pub fn c_nu(alpha: f64, nu: u32) -> Result<Complex64, OscError> {
    let k = AlphaConstants::new(alpha)?;
    let e = nu as f64 + 0.5;
    Ok(expansion_unit(nu) * libm::pow(alpha, k.beta * e) / libm::pow(alpha * (1.0 - alpha), e))
}

/// `b_ν(α) = c_ν(α) / α^(β(ν+1/2))`.
pub fn b_nu(alpha: f64, nu: u32) -> Result<Complex64, OscError> {
    let k = AlphaConstants::new(alpha)?;
    Ok(c_nu(alpha, nu)? / libm::pow(alpha, k.beta * (nu as f64 + 0.5)))
}

/// `c_μ(α)` in the second-step expansion.
pub fn c_mu(alpha: f64, mu: u32) -> Result<Complex64, OscError> {
    let k = AlphaConstants::new(alpha)?;
    let e = mu as f64 + 0.5;
    let ratio = (1.0 - alpha) / (alpha * (1.0 - 2.0 * alpha));
    Ok(expansion_unit(mu) * libm::pow(ratio, e) * libm::pow(alpha, 2.0 * k.omega * e))
}
