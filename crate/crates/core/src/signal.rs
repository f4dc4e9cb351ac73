//! Uniformly sampled piecewise-linear signals.
//!
//! A [`Signal`] stores samples `values[i]` at `x_min + i * step` and is read
//! back as the piecewise-linear interpolant of those samples. Outside the
//! sampled interval the [`EdgePolicy`] decides the value. Every operator in
//! this crate works on this representation, so the sup-norm of a difference of
//! two signals on a shared grid is exactly the max over grid points.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// How a signal is extended beyond its sampled interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EdgePolicy {
    /// The signal is zero outside `[x_min, x_max]`.
    #[default]
    ZeroExtend,
    /// The signal keeps its boundary sample outside `[x_min, x_max]`.
    ClampExtend,
}

/// A uniform grid `x_min + i * step`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    step: f64,
    len: usize,
}

impl Grid {
    pub fn new(x_min: f64, step: f64, len: usize) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidStep(step));
        }
        if !x_min.is_finite() {
            return Err(Error::InvalidParameter("grid origin must be finite"));
        }
        if len < 2 {
            return Err(Error::TooFewSamples(len));
        }
        Ok(Grid { x_min, step, len })
    }

    /// Grid covering `[x_min, x_max]` exactly, with spacing as large as
    /// possible but no larger than `max_step`.
    pub fn spanning(x_min: f64, x_max: f64, max_step: f64) -> Result<Self> {
        if !(max_step.is_finite() && max_step > 0.0) {
            return Err(Error::InvalidStep(max_step));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidParameter("grid interval must be finite and non-empty"));
        }
        let span = x_max - x_min;
        // tolerate spans that are an integer multiple of the step up to rounding
        let cells = libm::ceil(span / max_step - 1e-9).max(1.0) as usize;
        Grid::new(x_min, span / cells as f64, cells + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.len - 1)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; a grid has at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.step
    }

    /// Two grids are compatible when they have the same length and agree on
    /// origin and spacing up to floating-point noise.
    pub fn compatible(&self, other: &Grid) -> bool {
        self.len == other.len
            && libm::fabs(self.x_min - other.x_min) <= 1e-9 * self.step
            && libm::fabs(self.step - other.step) <= 1e-12 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.x(i))
    }
}

/// Pointwise binary operations on shared-grid signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    Add,
    Sub,
    PointMax,
    PointMin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    grid: Grid,
    values: Vec<f64>,
    edge: EdgePolicy,
}

impl Signal {
    pub fn new(x_min: f64, step: f64, values: Vec<f64>, edge: EdgePolicy) -> Result<Self> {
        let grid = Grid::new(x_min, step, values.len())?;
        Signal::on_grid(grid, values, edge)
    }

    pub fn on_grid(grid: Grid, values: Vec<f64>, edge: EdgePolicy) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Signal { grid, values, edge })
    }

    /// Samples `f` at every grid point.
    pub fn sample<F: FnMut(f64) -> f64>(grid: Grid, edge: EdgePolicy, mut f: F) -> Result<Self> {
        let values = grid.points().map(&mut f).collect();
        Signal::on_grid(grid, values, edge)
    }

    pub fn zeros(grid: Grid, edge: EdgePolicy) -> Self {
        Signal { grid, values: alloc::vec![0.0; grid.len()], edge }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn x_min(&self) -> f64 {
        self.grid.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.grid.x_max()
    }

    pub fn step(&self) -> f64 {
        self.grid.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn edge_policy(&self) -> EdgePolicy {
        self.edge
    }

    pub fn with_edge_policy(mut self, edge: EdgePolicy) -> Self {
        self.edge = edge;
        self
    }

    /// Same grid and edge policy, new samples.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Signal {
        debug_assert_eq!(values.len(), self.values.len());
        Signal { grid: self.grid, values, edge: self.edge }
    }

    /// Sample at a (possibly out-of-range) grid index, extended by the edge
    /// policy.
    #[inline]
    pub fn at_index(&self, i: isize) -> f64 {
        let n = self.values.len() as isize;
        if (0..n).contains(&i) {
            return self.values[i as usize];
        }
        match self.edge {
            EdgePolicy::ZeroExtend => 0.0,
            EdgePolicy::ClampExtend if i < 0 => self.values[0],
            EdgePolicy::ClampExtend => self.values[(n - 1) as usize],
        }
    }

    /// Value of the piecewise-linear interpolant at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let t = (x - self.grid.x_min) / self.grid.step;
        let nearest = libm::round(t);
        // snap coordinates that are a grid point up to rounding
        if libm::fabs(t - nearest) <= 1e-9 {
            return self.at_index(nearest as isize);
        }
        if t < 0.0 || t > (n - 1) as f64 {
            return self.at_index(if t < 0.0 { -1 } else { n as isize });
        }
        let i = (libm::floor(t) as usize).min(n - 2);
        let frac = t - i as f64;
        let (a, b) = (self.values[i], self.values[i + 1]);
        a + frac * (b - a)
    }

    /// Sup-norm distance. Both signals must share a grid; see
    /// [`sup_dist_resampled`] for the general case.
    pub fn sup_dist(&self, other: &Signal) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max)
    }

    /// Lipschitz constant of the interpolant on its sampled interval.
    pub fn measure_lipschitz(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| libm::fabs(w[1] - w[0]))
            .fold(0.0, f64::max)
            / self.grid.step
    }

    pub fn combine(&self, other: &Signal, kind: Combine) -> Result<Signal> {
        self.check_grid(other)?;
        let op: fn(f64, f64) -> f64 = match kind {
            Combine::Add => |a, b| a + b,
            Combine::Sub => |a, b| a - b,
            Combine::PointMax => f64::max,
            Combine::PointMin => f64::min,
        };
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect();
        Ok(self.with_values(values))
    }

    pub fn add(&self, other: &Signal) -> Result<Signal> {
        self.combine(other, Combine::Add)
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.combine(other, Combine::Sub)
    }

    pub fn negate(&self) -> Signal {
        self.map(|v| -v)
    }

    pub fn scale(&self, c: f64) -> Signal {
        self.map(|v| c * v)
    }

    pub fn map<F: FnMut(f64) -> f64>(&self, mut f: F) -> Signal {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    /// `s(x - m * step)` sampled on the same grid: the signal moved right by
    /// `m` grid cells, with the edge policy filling the vacated samples.
    pub fn translate(&self, m: isize) -> Signal {
        let values = (0..self.len() as isize).map(|i| self.at_index(i - m)).collect();
        self.with_values(values)
    }

    /// Mirror image about the midpoint of the sampled interval.
    pub fn reflect(&self) -> Signal {
        let mut values = self.values.clone();
        values.reverse();
        self.with_values(values)
    }

    /// Interpolates this signal onto `grid`, keeping the edge policy.
    pub fn resample(&self, grid: Grid) -> Signal {
        let values = grid.points().map(|x| self.eval(x)).collect();
        Signal { grid, values, edge: self.edge }
    }

    fn check_grid(&self, other: &Signal) -> Result<()> {
        if self.grid.compatible(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Sup-norm distance between signals on arbitrary grids, computed after
/// interpolating both onto the finer spacing over the union of their domains.
pub fn sup_dist_resampled(a: &Signal, b: &Signal) -> Result<f64> {
    if a.grid.compatible(&b.grid) {
        return a.sup_dist(b);
    }
    let lo = a.x_min().min(b.x_min());
    let hi = a.x_max().max(b.x_max());
    let grid = Grid::spanning(lo, hi, a.step().min(b.step()))?;
    a.resample(grid).sup_dist(&b.resample(grid))
}
