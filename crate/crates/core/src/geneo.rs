//! Shift operators and the box-convolution baseline.
//!
//! `max_shift(s, e)(x) = max(s(x - e), s(x + e))` and
//! `min_shift(s, e)(x) = min(s(x - e), s(x + e))` are equivariant under the
//! isometries of the line and 1-Lipschitz in sup-norm. Their composition
//! [`denoise`] first removes thin upward bumps (the min stage) and then thin
//! downward bumps (the max stage).
//!
//! Shift radii are snapped to the nearest multiple of the grid step, so on
//! the grid every operator is a pure selection of existing samples and the
//! equivariance and non-expansivity properties hold bit-for-bit.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::signal::{EdgePolicy, Signal};

/// Radii of the two stages of [`denoise`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShiftParams {
    /// Radius of the inner min stage.
    pub epsilon: f64,
    /// Radius of the outer max stage.
    pub delta: f64,
}

impl ShiftParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        positive("epsilon", epsilon)?;
        positive("delta", delta)?;
        Ok(ShiftParams { epsilon, delta })
    }

    /// `(2 sigma / beta, sigma / beta)`, the choice that yields the
    /// `3 L sigma / beta` error bound.
    pub fn for_noise(sigma: f64, beta: f64) -> Result<Self> {
        positive("sigma", sigma)?;
        positive("beta", beta)?;
        ShiftParams::new(2.0 * sigma / beta, sigma / beta)
    }

    /// `(tau, tau / 2)`, as used with [`tau_schedule`].
    pub fn from_tau(tau: f64) -> Result<Self> {
        ShiftParams::new(tau, tau / 2.0)
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// Number of grid cells closest to `shift`.
pub fn snap_shift(shift: f64, step: f64) -> usize {
    let cells = libm::round(shift / step);
    let applied = cells * step;
    if cells == 0.0 {
        log::warn!("shift {shift} is below half a grid step ({step}); operator reduces to the identity");
    } else if libm::fabs(applied - shift) > 0.5 * step * (1.0 + 1e-9) {
        log::warn!("shift {shift} snapped to {applied}");
    }
    cells as usize
}

fn shift_select(s: &Signal, eps: f64, pick: fn(f64, f64) -> f64) -> Result<Signal> {
    positive("epsilon", eps)?;
    let k = snap_shift(eps, s.step()) as isize;
    let values = (0..s.len() as isize).map(|i| pick(s.at_index(i - k), s.at_index(i + k))).collect();
    Ok(s.with_values(values))
}

/// Dilation by the two-point element `{-eps, +eps}`.
pub fn max_shift(s: &Signal, eps: f64) -> Result<Signal> {
    shift_select(s, eps, f64::max)
}

/// Erosion by the two-point element `{-eps, +eps}`.
pub fn min_shift(s: &Signal, eps: f64) -> Result<Signal> {
    shift_select(s, eps, f64::min)
}

/// `max_shift(min_shift(s, epsilon), delta)`.
pub fn denoise(s: &Signal, params: ShiftParams) -> Result<Signal> {
    max_shift(&min_shift(s, params.epsilon)?, params.delta)
}

/// Convolution with the box kernel of height `h / 2` on `[-1/h, 1/h]`.
///
/// The integral of the piecewise-linear interpolant is evaluated exactly
/// (trapezoid rule on whole cells, exact partial cells at the kernel ends),
/// so the kernel may be narrower than a grid cell.
pub fn convolve_box(s: &Signal, h: f64) -> Result<Signal> {
    positive("h", h)?;
    let radius = 1.0 / h;
    let primitive = Primitive::new(s);
    let values = s
        .grid()
        .points()
        .map(|x| 0.5 * h * (primitive.at(x + radius) - primitive.at(x - radius)))
        .collect();
    Ok(s.with_values(values))
}

/// Running integral of a signal, extended past the grid by its edge policy.
struct Primitive<'a> {
    signal: &'a Signal,
    prefix: Vec<f64>,
}

impl<'a> Primitive<'a> {
    fn new(signal: &'a Signal) -> Self {
        let h = signal.step();
        let mut prefix = Vec::with_capacity(signal.len());
        let mut acc = 0.0;
        prefix.push(acc);
        for w in signal.values().windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            prefix.push(acc);
        }
        Primitive { signal, prefix }
    }

    fn at(&self, x: f64) -> f64 {
        let s = self.signal;
        let v = s.values();
        let n = v.len();
        let h = s.step();
        let t = (x - s.x_min()) / h;
        if t <= 0.0 {
            return match s.edge_policy() {
                EdgePolicy::ZeroExtend => 0.0,
                EdgePolicy::ClampExtend => t * h * v[0],
            };
        }
        let last = (n - 1) as f64;
        if t >= last {
            return match s.edge_policy() {
                EdgePolicy::ZeroExtend => self.prefix[n - 1],
                EdgePolicy::ClampExtend => self.prefix[n - 1] + (t - last) * h * v[n - 1],
            };
        }
        let i = (libm::floor(t) as usize).min(n - 2);
        let f = t - i as f64;
        self.prefix[i] + h * f * (v[i] + 0.5 * f * (v[i + 1] - v[i]))
    }
}

/// `(1 - 1/n) 2 sigma/beta + (1/n)(theta/2 - 2 sigma/beta)`: a sequence of
/// admissible inner radii decreasing from the largest one (`n = 1`) towards
/// the smallest, `2 sigma / beta`.
pub fn tau_schedule(n: u32, sigma: f64, beta: f64, theta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("tau schedule index starts at 1"));
    }
    positive("sigma", sigma)?;
    positive("beta", beta)?;
    let lower = 2.0 * sigma / beta;
    if !(theta >= 4.0 * lower) {
        return Err(Error::InvalidParameter("theta must be at least 8 sigma / beta"));
    }
    let w = 1.0 / n as f64;
    Ok((1.0 - w) * lower + w * (0.5 * theta - lower))
}
