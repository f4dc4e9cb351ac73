//! Clean test signals: the two demo functions and random Lipschitz polylines.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::signal::{EdgePolicy, Grid, Signal};

/// Compactly supported demo signals, zero outside their interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DemoFunction {
    /// `sin x` on `[-4 pi, 4 pi]`.
    Sine,
    /// `(x-5)(x-3)(x+1)(x+4)(x+5)/1000` on `[-5, 5]`.
    Quintic,
}

impl DemoFunction {
    pub fn half_width(self) -> f64 {
        match self {
            DemoFunction::Sine => 4.0 * PI,
            DemoFunction::Quintic => 5.0,
        }
    }

    pub fn domain(self) -> (f64, f64) {
        let w = self.half_width();
        (-w, w)
    }

    pub fn lipschitz(self) -> f64 {
        match self {
            DemoFunction::Sine => 1.0,
            DemoFunction::Quintic => 27.0 / 25.0,
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return 0.0;
        }
        match self {
            DemoFunction::Sine => libm::sin(x),
            DemoFunction::Quintic => (x - 5.0) * (x - 3.0) * (x + 1.0) * (x + 4.0) * (x + 5.0) / 1000.0,
        }
    }

    /// Samples on `grid` (which may extend beyond the support).
    pub fn sample_on(self, grid: Grid) -> Signal {
        Signal::sample(grid, EdgePolicy::ZeroExtend, |x| self.eval(x)).expect("finite samples")
    }

    /// Samples on the support interval with spacing at most `step`.
    pub fn sample(self, step: f64) -> Result<Signal> {
        let (lo, hi) = self.domain();
        Ok(self.sample_on(Grid::spanning(lo, hi, step)?))
    }

    pub fn name(self) -> &'static str {
        match self {
            DemoFunction::Sine => "sine",
            DemoFunction::Quintic => "quintic",
        }
    }
}

impl core::str::FromStr for DemoFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" | "sin" => Ok(DemoFunction::Sine),
            "quintic" => Ok(DemoFunction::Quintic),
            _ => Err(Error::InvalidParameter("unknown demo function (expected sine or quintic)")),
        }
    }
}

/// Piecewise-linear function through sorted knots, zero outside them.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    knots: Vec<(f64, f64)>,
}

impl Polyline {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::TooFewSamples(knots.len()));
        }
        if knots.windows(2).any(|w| !(w[0].0 <= w[1].0)) {
            return Err(Error::InvalidParameter("polyline knots must be sorted"));
        }
        Ok(Polyline { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, x: f64) -> f64 {
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        if x < first.0 || x > last.0 {
            return 0.0;
        }
        // index of the first knot strictly right of x
        let j = self.knots.partition_point(|k| k.0 <= x).clamp(1, self.knots.len() - 1);
        let (x0, y0) = self.knots[j - 1];
        let (x1, y1) = self.knots[j];
        if x1 == x0 {
            return y1;
        }
        y0 + (x - x0) / (x1 - x0) * (y1 - y0)
    }

    pub fn lipschitz(&self) -> f64 {
        self.knots
            .windows(2)
            .filter(|w| w[1].0 > w[0].0)
            .map(|w| libm::fabs(w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .fold(0.0, f64::max)
    }

    pub fn sample_on(&self, grid: Grid) -> Signal {
        Signal::sample(grid, EdgePolicy::ZeroExtend, |x| self.eval(x)).expect("finite samples")
    }
}

/// Random `L`-Lipschitz polyline on `[0, ell]`, pinned to zero at both ends.
///
/// `n` interior knots are drawn uniformly and sorted. Each knot value is
/// uniform in the range that keeps the slope to the previous knot within
/// `L` and still allows a return to zero at `ell` with slope at most `L`.
pub fn random_lipschitz<R: Rng + ?Sized>(rng: &mut R, lipschitz: f64, n: usize, ell: f64) -> Result<Polyline> {
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return Err(Error::NonPositive { name: "lipschitz", value: lipschitz });
    }
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::NonPositive { name: "ell", value: ell });
    }
    let mut xs: Vec<f64> = (0..n).map(|_| crate::noise::open_uniform(rng, (0.0, ell))).collect();
    xs.sort_by(f64::total_cmp);

    let mut knots = Vec::with_capacity(n + 2);
    knots.push((0.0, 0.0));
    let (mut px, mut py) = (0.0, 0.0);
    for x in xs {
        let reach = lipschitz * (x - px);
        let back = lipschitz * (ell - x);
        let lo = (py - reach).max(-back);
        let hi = (py + reach).min(back);
        let y = if hi > lo { rng.random_range(lo..=hi) } else { 0.5 * (lo + hi) };
        knots.push((x, y));
        (px, py) = (x, y);
    }
    knots.push((ell, 0.0));
    Polyline::new(knots)
}

/// [`random_lipschitz`] sampled on `[0, ell]` with spacing at most `step`.
pub fn gen_lipschitz<R: Rng + ?Sized>(
    rng: &mut R,
    lipschitz: f64,
    n: usize,
    ell: f64,
    step: f64,
) -> Result<Signal> {
    let poly = random_lipschitz(rng, lipschitz, n, ell)?;
    Ok(poly.sample_on(Grid::spanning(0.0, ell, step)?))
}
