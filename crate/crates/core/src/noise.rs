//! Impulsive noise: finite sums of scaled, squeezed and shifted copies of a
//! compactly supported mother bump.
//!
//! A noise function is `R(x) = sum_i a_i psi(b_i (x - c_i))`. With
//! `supp(psi) ⊂ (-sigma, sigma)` and `beta = min b_i`, `R` vanishes outside
//! the union of the intervals `(c_i - sigma/beta, c_i + sigma/beta)`.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::signal::{EdgePolicy, Grid, Signal};

/// Default support radius bound for the mother bump.
pub const DEFAULT_SIGMA: f64 = 1.1;

/// Cap on rejection-sampling attempts before a configuration is declared
/// infeasible.
pub const MAX_ATTEMPTS: usize = 100_000;

/// `exp(1 - 1/(1 - x^2))` on `(-1, 1)`, zero elsewhere. Smooth, peaks at 1.
pub fn mother_bump(x: f64) -> f64 {
    let q = 1.0 - x * x;
    if q <= 0.0 {
        0.0
    } else {
        libm::exp(1.0 - 1.0 / q)
    }
}

/// A candidate mother bump.
pub trait BumpShape {
    fn value(&self, x: f64) -> f64;

    /// Half-width of the closed support.
    fn radius(&self) -> f64;
}

/// The reference bump [`mother_bump`], supported on `[-1, 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardBump;

impl BumpShape for StandardBump {
    fn value(&self, x: f64) -> f64 {
        mother_bump(x)
    }

    fn radius(&self) -> f64 {
        1.0
    }
}

/// Checks the mother-bump requirements numerically on a dense sample:
/// values in `[0, 1]`, zero at and beyond the declared radius, and the
/// declared radius strictly inside `(-sigma, sigma)`.
pub fn validate_bump<B: BumpShape + ?Sized>(shape: &B, sigma: f64) -> Result<()> {
    let radius = shape.radius();
    if !(radius > 0.0 && radius < sigma) {
        return Err(Error::InvalidParameter("bump support must lie strictly inside (-sigma, sigma)"));
    }
    const SAMPLES: usize = 8001;
    let span = 2.0 * sigma;
    for i in 0..SAMPLES {
        let x = -span + 2.0 * span * i as f64 / (SAMPLES - 1) as f64;
        let v = shape.value(x);
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter("bump values must lie in [0, 1]"));
        }
        if libm::fabs(x) >= radius && v != 0.0 {
            return Err(Error::InvalidParameter("bump must vanish outside its support"));
        }
    }
    Ok(())
}

/// One term `a psi(b (x - c))`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Impulse {
    /// Signed height.
    #[cfg_attr(feature = "serde", serde(rename = "a"))]
    pub amplitude: f64,
    /// Squeeze factor; the bump support has radius `radius(psi) / squeeze`.
    #[cfg_attr(feature = "serde", serde(rename = "b"))]
    pub squeeze: f64,
    #[cfg_attr(feature = "serde", serde(rename = "c"))]
    pub center: f64,
}

impl Impulse {
    pub fn new(amplitude: f64, squeeze: f64, center: f64) -> Self {
        Impulse { amplitude, squeeze, center }
    }

    #[inline]
    pub fn eval_with<B: BumpShape + ?Sized>(&self, shape: &B, x: f64) -> f64 {
        self.amplitude * shape.value(self.squeeze * (x - self.center))
    }
}

/// A noise function together with the `sigma` of its mother bump.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseSpec {
    pub sigma: f64,
    #[cfg_attr(feature = "serde", serde(rename = "bumps"))]
    impulses: Vec<Impulse>,
}

impl NoiseSpec {
    /// Validates the parameters and drops zero-amplitude terms.
    pub fn new(sigma: f64, impulses: Vec<Impulse>) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::NonPositive { name: "sigma", value: sigma });
        }
        for imp in &impulses {
            if !(imp.squeeze.is_finite() && imp.squeeze > 0.0) {
                return Err(Error::NonPositive { name: "squeeze", value: imp.squeeze });
            }
            if !(imp.amplitude.is_finite() && imp.center.is_finite()) {
                return Err(Error::InvalidParameter("impulse amplitude and center must be finite"));
            }
        }
        let impulses = impulses.into_iter().filter(|imp| imp.amplitude != 0.0).collect();
        Ok(NoiseSpec { sigma, impulses })
    }

    /// The null noise function.
    pub fn zero(sigma: f64) -> Self {
        NoiseSpec { sigma, impulses: Vec::new() }
    }

    /// Re-run the constructor checks, e.g. after deserialization.
    pub fn validated(self) -> Result<Self> {
        NoiseSpec::new(self.sigma, self.impulses)
    }

    pub fn impulses(&self) -> &[Impulse] {
        &self.impulses
    }

    /// Number of bumps.
    pub fn len(&self) -> usize {
        self.impulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.impulses.is_empty()
    }

    /// Smallest squeeze factor (`+inf` for the null function).
    pub fn beta(&self) -> f64 {
        self.impulses.iter().map(|i| i.squeeze).fold(f64::INFINITY, f64::min)
    }

    /// Smallest distance between two centers (`+inf` with fewer than two).
    pub fn eta(&self) -> f64 {
        let centers: Vec<f64> = self.impulses.iter().map(|i| i.center).collect();
        min_gap(&centers)
    }

    /// Largest absolute amplitude.
    pub fn alpha_bar(&self) -> f64 {
        self.impulses.iter().map(|i| libm::fabs(i.amplitude)).fold(0.0, f64::max)
    }

    pub fn support_set(&self) -> SupportSet {
        let r = self.sigma / self.beta();
        SupportSet { intervals: self.impulses.iter().map(|i| (i.center - r, i.center + r)).collect() }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with(&StandardBump, x)
    }

    pub fn eval_with<B: BumpShape + ?Sized>(&self, shape: &B, x: f64) -> f64 {
        self.impulses.iter().map(|imp| imp.eval_with(shape, x)).sum()
    }

    /// Samples `R` on `grid` with the reference bump.
    pub fn render(&self, grid: Grid, edge: EdgePolicy) -> Signal {
        self.render_with(&StandardBump, grid, edge)
    }

    pub fn render_with<B: BumpShape + ?Sized>(&self, shape: &B, grid: Grid, edge: EdgePolicy) -> Signal {
        let mut values = alloc::vec![0.0; grid.len()];
        // only touch the grid points inside each bump's support
        for imp in &self.impulses {
            let r = shape.radius() / imp.squeeze;
            let lo = libm::floor((imp.center - r - grid.x_min()) / grid.step()).max(0.0) as usize;
            let hi = (libm::ceil((imp.center + r - grid.x_min()) / grid.step()).max(0.0) as usize)
                .min(grid.len() - 1);
            for (i, v) in values.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *v += imp.eval_with(shape, grid.x(i));
            }
        }
        Signal::zeros(grid, edge).with_values(values)
    }

    /// Membership in the family with center separation at least `eta` and
    /// squeeze factors at least `beta`.
    pub fn in_family(&self, eta: f64, beta: f64) -> bool {
        self.impulses.iter().all(|i| i.squeeze >= beta) && self.eta() >= eta
    }

    /// Closed form of `min_shift(R, rho)` when `rho` separates the bumps
    /// (`lambda <= rho <= eta/2 - lambda` with `lambda >= sigma/beta`): every
    /// negative bump splits into copies at `c - rho` and `c + rho`, positive
    /// bumps vanish.
    pub fn min_shift_closed_form(&self, rho: f64) -> NoiseSpec {
        self.split(rho, |a| a < 0.0)
    }

    /// Closed form of `max_shift(R, rho)`; the mirror of
    /// [`min_shift_closed_form`](Self::min_shift_closed_form).
    pub fn max_shift_closed_form(&self, rho: f64) -> NoiseSpec {
        self.split(rho, |a| a > 0.0)
    }

    fn split(&self, rho: f64, keep: fn(f64) -> bool) -> NoiseSpec {
        let impulses = self
            .impulses
            .iter()
            .filter(|i| keep(i.amplitude))
            .flat_map(|i| {
                [Impulse { center: i.center - rho, ..*i }, Impulse { center: i.center + rho, ..*i }]
            })
            .collect();
        NoiseSpec { sigma: self.sigma, impulses }
    }
}

/// Union of open intervals outside of which a noise function vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSet {
    pub intervals: Vec<(f64, f64)>,
}

impl SupportSet {
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo < x && x < hi)
    }
}

/// Smallest pairwise distance, `+inf` for fewer than two points.
pub fn min_gap(points: &[f64]) -> f64 {
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Shrinks the center interval at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CenterMargin {
    None,
    Fixed(f64),
    /// A multiple of `sigma / beta`, where `beta` is the drawn minimum squeeze.
    ThinnessMultiple(f64),
}

/// Rejection rule on the drawn center separation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Separation {
    None,
    /// Keep only draws with `eta > value`.
    Fixed(f64),
    /// Keep only draws with `eta > factor * sigma / beta`, `beta` the drawn
    /// minimum squeeze.
    ThinnessMultiple(f64),
}

/// Uniform laws for random noise. Real ranges are open intervals, the count
/// range is inclusive.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseSampler {
    pub count: (usize, usize),
    pub amplitude: (f64, f64),
    pub squeeze: (f64, f64),
    pub center: (f64, f64),
    pub margin: CenterMargin,
    pub sigma: f64,
    pub separation: Separation,
    pub max_attempts: usize,
}

impl NoiseSampler {
    /// Signed amplitudes in `(-100, 100)`, squeezes in `(0, 100)`, centers in
    /// `(-ell + sigma/beta, ell - sigma/beta)`, resampled until
    /// `eta > 8 sigma / beta`.
    pub fn demo(ell: f64, sigma: f64) -> Self {
        NoiseSampler {
            count: (1, 10),
            amplitude: (-100.0, 100.0),
            squeeze: (0.0, 100.0),
            center: (-ell, ell),
            margin: CenterMargin::ThinnessMultiple(1.0),
            sigma,
            separation: Separation::ThinnessMultiple(8.0),
            max_attempts: MAX_ATTEMPTS,
        }
    }

    /// Positive amplitudes in `(0, alpha)`, squeezes in `(beta, 20)`, centers
    /// in `(3 sigma/beta, ell - 3 sigma/beta)`; no rejection.
    pub fn sweep(alpha: f64, beta: f64, ell: f64, sigma: f64) -> Self {
        NoiseSampler {
            count: (1, 10),
            amplitude: (0.0, alpha),
            squeeze: (beta, 20.0),
            center: (0.0, ell),
            margin: CenterMargin::Fixed(3.0 * sigma / beta),
            sigma,
            separation: Separation::None,
            max_attempts: MAX_ATTEMPTS,
        }
    }

    fn check(&self) -> Result<()> {
        let (k_lo, k_hi) = self.count;
        if k_lo > k_hi {
            return Err(Error::InvalidParameter("empty bump-count range"));
        }
        for (lo, hi) in [self.amplitude, self.squeeze, self.center] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidParameter("empty sampling interval"));
            }
        }
        if self.squeeze.0 < 0.0 {
            return Err(Error::InvalidParameter("squeeze range must be positive"));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::NonPositive { name: "sigma", value: self.sigma });
        }
        Ok(())
    }

    /// Draws a spec, retrying until the separation rule (and a non-empty
    /// center interval) is satisfied.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<NoiseSpec> {
        self.check()?;
        for _ in 0..self.max_attempts.max(1) {
            if let Some(spec) = self.try_sample(rng) {
                return Ok(spec);
            }
        }
        Err(Error::Infeasible { attempts: self.max_attempts })
    }

    fn try_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<NoiseSpec> {
        let k = rng.random_range(self.count.0..=self.count.1);
        let amplitudes: Vec<f64> = (0..k).map(|_| open_uniform(rng, self.amplitude)).collect();
        let squeezes: Vec<f64> = (0..k).map(|_| open_uniform(rng, self.squeeze)).collect();
        let beta = squeezes.iter().copied().fold(f64::INFINITY, f64::min);
        let thin = self.sigma / beta;
        let inset = match self.margin {
            CenterMargin::None => 0.0,
            CenterMargin::Fixed(m) => m,
            CenterMargin::ThinnessMultiple(m) if k > 0 => m * thin,
            CenterMargin::ThinnessMultiple(_) => 0.0,
        };
        let centers = (self.center.0 + inset, self.center.1 - inset);
        if !(centers.0 < centers.1) {
            return None;
        }
        let impulses: Vec<Impulse> = (0..k)
            .map(|i| Impulse::new(amplitudes[i], squeezes[i], open_uniform(rng, centers)))
            .collect();
        let spec = NoiseSpec::new(self.sigma, impulses).ok()?;
        let threshold = match self.separation {
            Separation::None => f64::NEG_INFINITY,
            Separation::Fixed(eta) => eta,
            Separation::ThinnessMultiple(f) => f * thin,
        };
        (spec.eta() > threshold).then_some(spec)
    }
}

/// Uniform on the open interval `(lo, hi)`.
pub fn open_uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    loop {
        let v = rng.random_range(lo..hi);
        if v > lo {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bump_values() {
        assert_eq!(mother_bump(0.0), 1.0);
        assert_eq!(mother_bump(1.5), 0.0);
        assert_eq!(mother_bump(-1.5), 0.0);
        assert_eq!(mother_bump(1.0), 0.0);
        let expected = (-1.0f64 / 3.0).exp();
        assert!((mother_bump(0.5) - expected).abs() < 1e-15);
        assert!((mother_bump(0.5) - 0.7165).abs() < 1e-4);
        validate_bump(&StandardBump, DEFAULT_SIGMA).unwrap();
        assert!(validate_bump(&StandardBump, 1.0).is_err());
    }

    struct TooTall;
    impl BumpShape for TooTall {
        fn value(&self, x: f64) -> f64 {
            2.0 * mother_bump(x)
        }
        fn radius(&self) -> f64 {
            1.0
        }
    }

    #[test]
    fn invalid_shape_rejected() {
        assert!(validate_bump(&TooTall, DEFAULT_SIGMA).is_err());
    }

    #[test]
    fn derived_quantities() {
        let spec = NoiseSpec::new(
            1.1,
            vec![Impulse::new(5.0, 11.0, 0.0), Impulse::new(-7.0, 12.0, 9.0), Impulse::new(0.0, 1.0, 3.0)],
        )
        .unwrap();
        assert_eq!(spec.len(), 2, "zero-amplitude bump dropped");
        assert_eq!(spec.beta(), 11.0);
        assert_eq!(spec.eta(), 9.0);
        assert_eq!(spec.alpha_bar(), 7.0);
        let single = NoiseSpec::new(1.1, vec![Impulse::new(1.0, 2.0, 0.0)]).unwrap();
        assert_eq!(single.eta(), f64::INFINITY);
        assert!(NoiseSpec::new(1.1, vec![Impulse::new(1.0, 0.0, 0.0)]).is_err());
        assert!(NoiseSpec::new(0.0, vec![]).is_err());
    }

    #[test]
    fn render_examples() {
        let grid = Grid::spanning(-10.0, 10.0, 0.01).unwrap();
        let empty = NoiseSpec::zero(1.1).render(grid, EdgePolicy::ZeroExtend);
        assert_eq!(empty.sup_norm(), 0.0);

        let one = NoiseSpec::new(1.1, vec![Impulse::new(5.0, 1.0, 0.0)]).unwrap();
        assert!((one.render(grid, EdgePolicy::ZeroExtend).eval(0.0) - 5.0).abs() < 1e-12);

        let two = NoiseSpec::new(1.1, vec![Impulse::new(5.0, 2.0, -3.0), Impulse::new(-8.0, 2.0, 3.0)])
            .unwrap();
        let r = two.render(grid, EdgePolicy::ZeroExtend);
        assert!((r.sup_norm() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn render_vanishes_outside_support() {
        let grid = Grid::spanning(-10.0, 10.0, 0.003).unwrap();
        let spec = NoiseSpec::new(1.1, vec![Impulse::new(5.0, 3.0, -4.0), Impulse::new(-2.0, 7.0, 5.0)])
            .unwrap();
        let r = spec.render(grid, EdgePolicy::ZeroExtend);
        let support = spec.support_set();
        for (i, x) in grid.points().enumerate() {
            if !support.contains(x) {
                assert_eq!(r.values()[i], 0.0, "x = {x}");
            }
            assert!((r.values()[i] - spec.eval(x)).abs() < 1e-12);
        }
        assert!(r.sup_norm() <= spec.len() as f64 * spec.alpha_bar());
    }

    #[test]
    fn family_membership() {
        let one = NoiseSpec::new(1.1, vec![Impulse::new(1.0, 11.0, 0.0)]).unwrap();
        assert!(one.in_family(1e9, 11.0));
        let close = NoiseSpec::new(1.1, vec![Impulse::new(1.0, 11.0, 0.0), Impulse::new(1.0, 11.0, 0.5)])
            .unwrap();
        assert!(!close.in_family(1.0, 11.0));
        let three = NoiseSpec::new(
            1.1,
            vec![Impulse::new(1.0, 11.0, 0.0), Impulse::new(-1.0, 11.0, 9.0), Impulse::new(2.0, 11.0, 18.0)],
        )
        .unwrap();
        assert!(three.in_family(8.8, 11.0));
        assert!(!three.in_family(8.8, 11.5));
    }

    #[test]
    fn closed_forms_keep_sign_and_split_centers() {
        let spec = NoiseSpec::new(1.1, vec![Impulse::new(3.0, 10.0, 0.0), Impulse::new(-4.0, 10.0, 5.0)])
            .unwrap();
        let lo = spec.min_shift_closed_form(0.5);
        let centers: Vec<f64> = lo.impulses().iter().map(|i| i.center).collect();
        assert_eq!(centers, vec![4.5, 5.5]);
        assert!(lo.impulses().iter().all(|i| i.amplitude < 0.0));
        let hi = spec.max_shift_closed_form(0.5);
        assert_eq!(hi.impulses().iter().map(|i| i.center).collect::<Vec<_>>(), vec![-0.5, 0.5]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let sampler = NoiseSampler::demo(4.0 * core::f64::consts::PI, DEFAULT_SIGMA);
        let a = sampler.sample(&mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = sampler.sample(&mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejection_postcondition() {
        let sampler = NoiseSampler::demo(4.0 * core::f64::consts::PI, DEFAULT_SIGMA);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let spec = sampler.sample(&mut rng).unwrap();
            let beta = spec.beta();
            assert!(spec.in_family(8.0 * spec.sigma / beta, beta));
            for imp in spec.impulses() {
                assert!(imp.amplitude > -100.0 && imp.amplitude < 100.0);
                assert!(imp.squeeze > 0.0 && imp.squeeze < 100.0);
                let inset = spec.sigma / beta;
                assert!(imp.center > -4.0 * core::f64::consts::PI + inset);
            }
        }
    }

    #[test]
    fn infeasible_configuration_reported() {
        let sampler = NoiseSampler {
            count: (5, 5),
            center: (0.0, 1.0),
            separation: Separation::Fixed(0.5),
            max_attempts: 1000,
            ..NoiseSampler::sweep(10.0, 5.0, 20.0, DEFAULT_SIGMA)
        };
        let mut sampler = sampler;
        sampler.margin = CenterMargin::None;
        let err = sampler.sample(&mut ChaCha8Rng::seed_from_u64(1)).unwrap_err();
        assert_eq!(err, Error::Infeasible { attempts: 1000 });
    }

    #[test]
    fn min_gap_basic() {
        assert_eq!(min_gap(&[]), f64::INFINITY);
        assert_eq!(min_gap(&[3.0]), f64::INFINITY);
        assert_eq!(min_gap(&[5.0, 1.0, 3.5]), 1.5);
    }
}
