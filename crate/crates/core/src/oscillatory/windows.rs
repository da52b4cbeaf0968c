use alloc::vec::Vec;

use crate::smoothing::{smoothstep, BumpWindow, DyadicPartition};

/// A smooth, compactly supported amplitude `w`.
pub trait WindowModel {
    fn eval(&self, t: f64) -> f64;

    /// Closed interval outside which `w` vanishes.
    fn support(&self) -> (f64, f64);

    /// Points where the piecewise definition changes; quadrature panels
    /// never straddle them.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Length over which `w` changes by a relative amount of order one.
    fn scale(&self) -> f64;
}

impl WindowModel for BumpWindow {
    fn eval(&self, t: f64) -> f64 {
        BumpWindow::eval(self, t)
    }

    fn support(&self) -> (f64, f64) {
        BumpWindow::support(self)
    }

    fn breakpoints(&self) -> Vec<f64> {
        BumpWindow::breakpoints(self).to_vec()
    }

    fn scale(&self) -> f64 {
        self.delta()
    }
}

/// 1 on `[lo, hi]`, smooth ramps of width `ramp` on either side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub lo: f64,
    pub hi: f64,
    pub ramp: f64,
}

impl WindowModel for Plateau {
    fn eval(&self, t: f64) -> f64 {
        if t < self.lo {
            smoothstep((t - (self.lo - self.ramp)) / self.ramp)
        } else if t <= self.hi {
            1.0
        } else {
            smoothstep((self.hi + self.ramp - t) / self.ramp)
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.lo - self.ramp, self.hi + self.ramp)
    }

    fn breakpoints(&self) -> Vec<f64> {
        alloc::vec![self.lo - self.ramp, self.lo, self.hi, self.hi + self.ramp]
    }

    fn scale(&self) -> f64 {
        self.ramp
    }
}

/// `exp(1 - 1/(1 - x²))` with `x = (t - center)/radius`: equal to 1 at the
/// center with curvature `-2/radius²` there, and no flat part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactBump {
    pub center: f64,
    pub radius: f64,
}

impl WindowModel for CompactBump {
    fn eval(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.radius;
        let r = 1.0 - x * x;
        if r <= 0.0 {
            return 0.0;
        }
        libm::exp(1.0 - 1.0 / r)
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }

    fn scale(&self) -> f64 {
        0.25 * self.radius
    }
}

fn member_breakpoints(p: &DyadicPartition, l: u32) -> [f64; 3] {
    let (lo, hi) = p.support(l);
    [lo, p.grid().get(l).unwrap(), hi]
}

/// `w(t) = f₃(Xt/umn) Ψ_K(Xt/umn) ψ(t)` with `f₃ = log` or `f₃ = 1`.
#[derive(Debug, Clone, Copy)]
pub struct FirstPoissonWindow<'a> {
    pub x: f64,
    pub umn: f64,
    pub window: &'a BumpWindow,
    pub partition: &'a DyadicPartition,
    pub k_index: u32,
    pub f_log: bool,
}

impl FirstPoissonWindow<'_> {
    /// Weight of the summand `k`: `f₃(k) Ψ_K(k) ψ(umnk/X)`.
    pub fn at_k(&self, k: f64) -> f64 {
        let psi_k = self.partition.member_by_index(self.k_index, k);
        if psi_k == 0.0 {
            return 0.0;
        }
        let f = if self.f_log { libm::log(k) } else { 1.0 };
        f * psi_k * self.window.eval(self.umn * k / self.x)
    }

    /// Integers `k` where the summand can be nonzero.
    pub fn k_range(&self) -> (u64, u64) {
        let (lo, hi) = WindowModel::support(self);
        let c = self.x / self.umn;
        (
            (libm::floor(lo * c) as u64).max(1),
            libm::ceil(hi * c) as u64,
        )
    }
}

impl WindowModel for FirstPoissonWindow<'_> {
    fn eval(&self, t: f64) -> f64 {
        self.at_k(self.x * t / self.umn)
    }

    fn support(&self) -> (f64, f64) {
        let (a, b) = self.window.support();
        let (c, d) = self.partition.support(self.k_index);
        let r = self.umn / self.x;
        (a.max(c * r), b.min(d * r).max(a.max(c * r)))
    }

    fn breakpoints(&self) -> Vec<f64> {
        let r = self.umn / self.x;
        let mut v = self.window.breakpoints().to_vec();
        v.extend(
            member_breakpoints(self.partition, self.k_index)
                .iter()
                .map(|b| b * r),
        );
        v
    }

    fn scale(&self) -> f64 {
        let (c, _) = self.partition.support(self.k_index);
        let ramp = (self.partition.theta() - 1.0) * c * self.umn / self.x;
        ramp.min(self.window.delta())
    }
}

/// `F(x) = f₂(x) Ψ_N(x) x^p`, the amplitude of the second summation.
#[derive(Debug, Clone, Copy)]
pub struct NAmplitude<'a> {
    pub partition: &'a DyadicPartition,
    pub n_index: u32,
    pub power: f64,
    pub f_log: bool,
}

impl WindowModel for NAmplitude<'_> {
    fn eval(&self, x: f64) -> f64 {
        let psi = self.partition.member_by_index(self.n_index, x);
        if psi == 0.0 {
            return 0.0;
        }
        let f = if self.f_log { libm::log(x) } else { 1.0 };
        f * psi * libm::pow(x, self.power)
    }

    fn support(&self) -> (f64, f64) {
        self.partition.support(self.n_index)
    }

    fn breakpoints(&self) -> Vec<f64> {
        member_breakpoints(self.partition, self.n_index).to_vec()
    }

    fn scale(&self) -> f64 {
        (self.partition.theta() - 1.0) * self.partition.support(self.n_index).0
    }
}

/// `τ ↦ w(cτ)`.
pub struct Rescaled<'a> {
    pub inner: &'a dyn WindowModel,
    pub c: f64,
}

impl WindowModel for Rescaled<'_> {
    fn eval(&self, t: f64) -> f64 {
        self.inner.eval(self.c * t)
    }

    fn support(&self) -> (f64, f64) {
        let (a, b) = self.inner.support();
        (a / self.c, b / self.c)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner
            .breakpoints()
            .iter()
            .map(|b| b / self.c)
            .collect()
    }

    fn scale(&self) -> f64 {
        self.inner.scale() / self.c
    }
}
