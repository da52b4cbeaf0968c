//! The smooth cutoff `ψ` and the refined dyadic partition of unity
//! `Ψ_D(x) = Ψ(x/D) - Ψ(Θx/D)` on the grid `D = Θ^l`.

use alloc::vec::Vec;
use thiserror::Error;

use crate::numdiff;

/// Name recorded in result metadata for the transition function.
pub const MOLLIFIER: &str = "smoothstep S(t) = f(t)/(f(t)+f(1-t)), f(t) = exp(-1/t)";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmoothingError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("{0} is not a grid point Θ^l")]
    OffGrid(f64),
    #[error("derivative order {0} is above the supported maximum 6")]
    UnsupportedOrder(usize),
}

/// `C^∞` step: 0 for `t <= 0`, 1 for `t >= 1`, `S(t) + S(1-t) = 1`.
#[inline]
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + libm::exp(1.0 / t - 1.0 / (1.0 - t)))
    }
}

/// `ψ`: 1 on `[1, y]`, 0 outside `(1-Δ, y+Δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpWindow {
    y: f64,
    delta: f64,
    b0: f64,
}

impl BumpWindow {
    pub fn new(y: f64, delta: f64, b0: f64) -> Result<Self, SmoothingError> {
        if !(y > 1.0) || !y.is_finite() {
            return Err(SmoothingError::InvalidParameter("y must exceed 1"));
        }
        if !(delta > 0.0 && delta < 0.25 && delta < (y - 1.0) / 2.0) {
            return Err(SmoothingError::InvalidParameter(
                "delta must lie in (0, min(1/4, (y-1)/2))",
            ));
        }
        if !(b0 >= 1.0) {
            return Err(SmoothingError::InvalidParameter("b0 must be at least 1"));
        }
        Ok(BumpWindow { y, delta, b0 })
    }

    /// `Δ = (log X)^(-B₀)`.
    pub fn from_log_scale(x: f64, y: f64, b0: f64) -> Result<Self, SmoothingError> {
        if !(x > core::f64::consts::E) {
            return Err(SmoothingError::InvalidParameter("X must exceed e"));
        }
        Self::new(y, libm::pow(libm::log(x), -b0), b0)
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    /// Closed support `[1-Δ, y+Δ]`.
    pub fn support(&self) -> (f64, f64) {
        (1.0 - self.delta, self.y + self.delta)
    }

    /// Points where the piecewise definition switches branch.
    pub fn breakpoints(&self) -> [f64; 4] {
        [1.0 - self.delta, 1.0, self.y, self.y + self.delta]
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 1.0 - self.delta || x >= self.y + self.delta {
            0.0
        } else if x < 1.0 {
            smoothstep((x - (1.0 - self.delta)) / self.delta)
        } else if x <= self.y {
            1.0
        } else {
            smoothstep((self.y + self.delta - x) / self.delta)
        }
    }

    /// `ψ^{(j)}(x)` for `j <= 6`.
    pub fn derivative(&self, j: usize, x: f64) -> Result<f64, SmoothingError> {
        window_derivative(self, j, x)
    }
}

/// `j`-th derivative of the bump by extrapolated central differences.
pub fn window_derivative(w: &BumpWindow, j: usize, x: f64) -> Result<f64, SmoothingError> {
    numdiff::derivative(|t| w.eval(t), x, j, w.delta).ok_or(SmoothingError::UnsupportedOrder(j))
}

/// `𝐆 = {Θ^l : 0 <= l <= max_power}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridG {
    theta: f64,
    values: Vec<f64>,
}

impl GridG {
    pub fn new(theta: f64, max_power: u32) -> Result<Self, SmoothingError> {
        if !(theta > 1.0) || !theta.is_finite() {
            return Err(SmoothingError::InvalidParameter("theta must exceed 1"));
        }
        let values: Vec<f64> = (0..=max_power as i32)
            .map(|l| libm::pow(theta, l as f64))
            .collect();
        if !values.last().unwrap().is_finite() {
            return Err(SmoothingError::InvalidParameter(
                "theta^max_power overflows",
            ));
        }
        Ok(GridG { theta, values })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn max_power(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, l: u32) -> Option<f64> {
        self.values.get(l as usize).copied()
    }

    /// Index `l` with `Θ^l = d` to relative precision 1e-12.
    pub fn index_of(&self, d: f64) -> Option<u32> {
        if !(d > 0.0) {
            return None;
        }
        let l = libm::round(libm::log(d) / libm::log(self.theta));
        if l < 0.0 || l as usize >= self.values.len() {
            return None;
        }
        let g = self.values[l as usize];
        ((d - g).abs() <= 1e-12 * g).then_some(l as u32)
    }

    /// Largest grid point not above `x`, if any.
    pub fn floor_index(&self, x: f64) -> Option<u32> {
        match self.values.partition_point(|&g| g <= x) {
            0 => None,
            k => Some(k as u32 - 1),
        }
    }
}

/// The family `{Ψ_D : D ∈ 𝐆}` built from one master function `Ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicPartition {
    grid: GridG,
    a0: f64,
}

impl DyadicPartition {
    pub fn new(theta: f64, a0: f64, max_power: u32) -> Result<Self, SmoothingError> {
        if !(a0 >= 1.0) {
            return Err(SmoothingError::InvalidParameter("a0 must be at least 1"));
        }
        Ok(DyadicPartition {
            grid: GridG::new(theta, max_power)?,
            a0,
        })
    }

    /// `Θ = 1 + (log X)^(-A₀)`, with enough powers to cover `[1, X]`.
    pub fn from_log_scale(x: f64, a0: f64) -> Result<Self, SmoothingError> {
        if !(x > core::f64::consts::E) {
            return Err(SmoothingError::InvalidParameter("X must exceed e"));
        }
        let theta = 1.0 + libm::pow(libm::log(x), -a0);
        let max_power = libm::ceil(libm::log(x) / libm::log(theta)) as u32 + 2;
        Self::new(theta, a0, max_power)
    }

    pub fn theta(&self) -> f64 {
        self.grid.theta
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn grid(&self) -> &GridG {
        &self.grid
    }

    /// Master `Ψ`: even, 1 on `[-1, 1]`, 0 outside `(-Θ, Θ)`.
    pub fn master(&self, x: f64) -> f64 {
        let ax = x.abs();
        let theta = self.grid.theta;
        if ax <= 1.0 {
            1.0
        } else if ax >= theta {
            0.0
        } else {
            smoothstep((theta - ax) / (theta - 1.0))
        }
    }

    // Ψ(x / Θ^(l-1)), with Θ^(-1) standing in for l = 0.
    fn level(&self, l: i64, x: f64) -> f64 {
        let g = if l < 0 {
            1.0 / self.grid.theta
        } else {
            self.grid.values[l as usize]
        };
        self.master(x / g)
    }

    /// `Ψ_D(x)` for `D = Θ^l`.
    pub fn member_by_index(&self, l: u32, x: f64) -> f64 {
        let l = l as i64;
        self.level(l, x) - self.level(l - 1, x)
    }

    pub fn eval_member(&self, d: f64, x: f64) -> Result<f64, SmoothingError> {
        let l = self.grid.index_of(d).ok_or(SmoothingError::OffGrid(d))?;
        Ok(self.member_by_index(l, x))
    }

    /// Closed support `[D/Θ, DΘ]` of `Ψ_D`.
    pub fn support(&self, l: u32) -> (f64, f64) {
        let theta = self.grid.theta;
        let d = self.grid.values[l as usize];
        let lo = if l == 0 {
            1.0 / theta
        } else {
            self.grid.values[l as usize - 1]
        };
        (lo, d * theta)
    }

    /// Indices whose member can be nonzero at `x`.
    pub fn active(&self, x: f64) -> core::ops::RangeInclusive<u32> {
        let theta = self.grid.theta;
        let max = self.grid.max_power();
        let lo = self.grid.floor_index(x / theta).unwrap_or_default();
        let hi = match self.grid.floor_index(x * theta) {
            Some(l) => (l + 1).min(max),
            None => 0,
        };
        lo..=hi.max(lo)
    }

    /// `Σ_{D ∈ 𝐆} Ψ_D(x)`; equals 1 on `[1, Θ^(max_power - 1)]`.
    pub fn partition_sum(&self, x: f64) -> f64 {
        self.active(x).map(|l| self.member_by_index(l, x)).sum()
    }
}
