//! One Monte Carlo trial: clean signal, random noise, denoising and the
//! resulting errors.
//!
//! Every trial is fully determined by its configuration and a 64-bit seed.
//! Batches derive per-trial seeds with [`trial_seed`], so trials can run in
//! any order or in parallel.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::standard_bound;
use crate::error::{Error, Result};
use crate::functions::{random_lipschitz, DemoFunction};
use crate::geneo::{denoise, ShiftParams};
use crate::matching::bottleneck;
use crate::noise::{open_uniform, BumpShape, Impulse, NoiseSampler, NoiseSpec, StandardBump};
use crate::persistence::sublevel_pd0;
use crate::signal::{EdgePolicy, Grid, Signal};

/// The clean signal of a trial.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CleanSignal {
    Demo(DemoFunction),
    /// Random polyline on `[0, ell]` with a uniform number of interior knots
    /// in the inclusive range `knots`.
    RandomLipschitz { lipschitz: f64, knots: (usize, usize), ell: f64 },
}

impl CleanSignal {
    fn domain(&self) -> (f64, f64) {
        match self {
            CleanSignal::Demo(d) => d.domain(),
            CleanSignal::RandomLipschitz { ell, .. } => (0.0, *ell),
        }
    }
}

/// How the noise of a trial is drawn.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NoiseLaw {
    None,
    Sampled(NoiseSampler),
    /// Fixed amplitudes and squeezes; the centers are independent and
    /// uniform on the closed interval `centers`.
    UniformCenters { amplitudes: Vec<f64>, squeezes: Vec<f64>, centers: (f64, f64) },
}

/// Where the `beta` used for the shift radii and the bound comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Thinness {
    /// A fixed lower bound on the squeeze factors.
    Nominal(f64),
    /// The smallest squeeze factor of the drawn noise.
    Drawn,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialConfig {
    pub clean: CleanSignal,
    pub noise: NoiseLaw,
    pub sigma: f64,
    /// Largest grid spacing.
    pub step: f64,
    pub thinness: Thinness,
    /// Refine the grid for thin noise; see [`resolution_step`].
    pub refine: bool,
    /// Compute the bottleneck distance between clean and denoised diagrams.
    pub diagrams: bool,
}

impl TrialConfig {
    /// Demo signal with signed noise drawn until `eta > 8 sigma/beta`,
    /// `beta` being the drawn minimum squeeze. Grid spacing `half_width/4000`.
    pub fn demo(demo: DemoFunction, sigma: f64) -> Self {
        let w = demo.half_width();
        TrialConfig {
            clean: CleanSignal::Demo(demo),
            noise: NoiseLaw::Sampled(NoiseSampler::demo(w, sigma)),
            sigma,
            step: w / 4000.0,
            thinness: Thinness::Drawn,
            refine: true,
            diagrams: true,
        }
    }

    /// Random Lipschitz signal on `[0, ell]` with positive noise of height
    /// below `alpha` and squeeze above `beta`, no rejection.
    pub fn sweep(alpha: f64, beta: f64, lipschitz: f64, ell: f64, sigma: f64) -> Self {
        TrialConfig {
            clean: CleanSignal::RandomLipschitz { lipschitz, knots: (1, 10), ell },
            noise: NoiseLaw::Sampled(NoiseSampler::sweep(alpha, beta, ell, sigma)),
            sigma,
            step: ell / 4000.0,
            thinness: Thinness::Nominal(beta),
            refine: true,
            diagrams: false,
        }
    }

    /// Random Lipschitz signal on `[0, ell]`; fixed bump heights and widths,
    /// centers uniform on `[0, ell]`.
    pub fn uniform_centers(lipschitz: f64, amplitudes: Vec<f64>, beta: f64, ell: f64, sigma: f64) -> Self {
        let squeezes = alloc::vec![beta; amplitudes.len()];
        TrialConfig {
            clean: CleanSignal::RandomLipschitz { lipschitz, knots: (1, 10), ell },
            noise: NoiseLaw::UniformCenters { amplitudes, squeezes, centers: (0.0, ell) },
            sigma,
            step: ell / 4000.0,
            thinness: Thinness::Nominal(beta),
            refine: true,
            diagrams: false,
        }
    }
}

/// Summary of one trial.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialRecord {
    pub seed: u64,
    pub lipschitz: f64,
    /// Interior knots of the clean polyline (0 for demos).
    pub knots: usize,
    /// Number of bumps.
    pub bumps: usize,
    pub beta: f64,
    pub eta: f64,
    pub alpha_bar: f64,
    /// Sup-norm of noisy minus clean.
    pub raw_error: f64,
    /// Sup-norm of denoised minus clean.
    pub denoised_error: f64,
    /// `3 L sigma / beta`.
    pub det_bound: f64,
    /// Whether the noise satisfies `eta >= 8 sigma/beta` and all squeezes
    /// are at least `beta`.
    pub in_family: bool,
    pub pd_distance: Option<f64>,
    /// Grid spacing actually used.
    pub step: f64,
}

impl TrialRecord {
    /// `det_bound - denoised_error`.
    pub fn overestimation(&self) -> f64 {
        self.det_bound - self.denoised_error
    }
}

/// All signals of one trial, for inspection and plotting.
#[derive(Debug, Clone)]
pub struct Realization {
    pub clean: Signal,
    pub noise: NoiseSpec,
    pub noisy: Signal,
    pub denoised: Signal,
    pub params: ShiftParams,
    pub beta: f64,
    pub lipschitz: f64,
    pub knots: usize,
}

/// Largest spacing at which the grid resolves the gap between the bump
/// support radius `max 1/b_i` and the shift unit `sigma/beta`. Nearest-cell
/// snapping of both shifts then keeps them inside the admissible ranges.
/// `None` when the shift unit does not exceed the support radius.
pub fn resolution_step(noise: &NoiseSpec, sigma: f64, beta: f64) -> Option<f64> {
    let support = noise
        .impulses()
        .iter()
        .map(|i| StandardBump.radius() / i.squeeze)
        .fold(0.0, f64::max);
    let unit = sigma / beta;
    (unit > support && support > 0.0).then_some(0.5 * (unit - support))
}

/// Largest number of grid cells a trial may refine to.
const MAX_CELLS: f64 = 4.0e6;

/// Draws and denoises one trial.
pub fn realize<R: Rng + ?Sized>(cfg: &TrialConfig, rng: &mut R) -> Result<Realization> {
    let (lipschitz, knots, poly) = match &cfg.clean {
        CleanSignal::Demo(d) => (d.lipschitz(), 0, None),
        CleanSignal::RandomLipschitz { lipschitz, knots, ell } => {
            if knots.0 > knots.1 {
                return Err(Error::InvalidParameter("empty knot-count range"));
            }
            let n = rng.random_range(knots.0..=knots.1);
            (*lipschitz, n, Some(random_lipschitz(rng, *lipschitz, n, *ell)?))
        }
    };
    let noise = match &cfg.noise {
        NoiseLaw::None => NoiseSpec::zero(cfg.sigma),
        NoiseLaw::Sampled(sampler) => sampler.sample(rng)?,
        NoiseLaw::UniformCenters { amplitudes, squeezes, centers } => {
            if amplitudes.len() != squeezes.len() {
                return Err(Error::InvalidParameter("amplitude and squeeze lists differ in length"));
            }
            let impulses = amplitudes
                .iter()
                .zip(squeezes)
                .map(|(&a, &b)| Impulse::new(a, b, closed_uniform(rng, *centers)))
                .collect();
            NoiseSpec::new(cfg.sigma, impulses)?
        }
    };
    let beta = match cfg.thinness {
        Thinness::Nominal(b) => b,
        Thinness::Drawn => noise.beta(),
    };
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter("trial needs a finite positive beta"));
    }
    let params = ShiftParams::for_noise(cfg.sigma, beta)?;

    // the grid covers the clean support and every bump support
    let (mut lo, mut hi) = cfg.clean.domain();
    for imp in noise.impulses() {
        let r = StandardBump.radius() / imp.squeeze;
        lo = lo.min(imp.center - r);
        hi = hi.max(imp.center + r);
    }
    let mut step = cfg.step;
    if cfg.refine {
        if let Some(fine) = resolution_step(&noise, cfg.sigma, beta) {
            if (hi - lo) / fine <= MAX_CELLS {
                step = step.min(fine);
            }
        }
    }
    let grid = Grid::spanning(lo, hi, step)?;
    let clean = match (&cfg.clean, poly) {
        (CleanSignal::Demo(d), _) => d.sample_on(grid),
        (_, Some(p)) => p.sample_on(grid),
        _ => unreachable!(),
    };
    let noisy = clean.add(&noise.render(grid, EdgePolicy::ZeroExtend))?;
    let denoised = denoise(&noisy, params)?;
    Ok(Realization { clean, noise, noisy, denoised, params, beta, lipschitz, knots })
}

fn closed_uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// Runs one trial from its seed.
pub fn run_trial(cfg: &TrialConfig, seed: u64) -> Result<TrialRecord> {
    let r = realize_seeded(cfg, seed)?;
    Ok(record(cfg, seed, &r))
}

/// [`realize`] driven by a ChaCha8 stream seeded with `seed`.
pub fn realize_seeded(cfg: &TrialConfig, seed: u64) -> Result<Realization> {
    realize(cfg, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Metrics of a realization.
pub fn record(cfg: &TrialConfig, seed: u64, r: &Realization) -> TrialRecord {
    let raw_error = r.noisy.sup_dist(&r.clean).expect("shared grid");
    let denoised_error = r.denoised.sup_dist(&r.clean).expect("shared grid");
    let eta = r.noise.eta();
    let in_family = r.noise.in_family(8.0 * cfg.sigma / r.beta, r.beta);
    let pd_distance = cfg
        .diagrams
        .then(|| bottleneck(&sublevel_pd0(&r.clean), &sublevel_pd0(&r.denoised)).distance);
    TrialRecord {
        seed,
        lipschitz: r.lipschitz,
        knots: r.knots,
        bumps: r.noise.len(),
        beta: r.beta,
        eta,
        alpha_bar: r.noise.alpha_bar(),
        raw_error,
        denoised_error,
        det_bound: standard_bound(r.lipschitz, cfg.sigma, r.beta),
        in_family,
        pd_distance,
        step: r.clean.step(),
    }
}

/// Seed of trial `index` in a batch seeded with `base` (SplitMix64 of the
/// pair, so neighbouring indices give unrelated streams).
pub fn trial_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `k` independent uniform points on `[0, ell]`.
pub fn uniform_points<R: Rng + ?Sized>(rng: &mut R, k: usize, ell: f64) -> Vec<f64> {
    (0..k).map(|_| open_uniform(rng, (0.0, ell))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::DEFAULT_SIGMA;

    #[test]
    fn zero_noise_trial() {
        let cfg = TrialConfig {
            noise: NoiseLaw::None,
            diagrams: true,
            ..TrialConfig::uniform_centers(2.0, alloc::vec![], 11.0, 20.0, DEFAULT_SIGMA)
        };
        for seed in 0..10 {
            let r = run_trial(&cfg, seed).unwrap();
            assert_eq!(r.raw_error, 0.0);
            assert!(r.denoised_error <= r.det_bound + r.lipschitz * r.step);
            assert!(r.in_family);
            assert!(r.pd_distance.unwrap() <= r.denoised_error + 1e-9);
        }
    }

    #[test]
    fn in_family_trials_respect_the_bound() {
        let cfg = TrialConfig::demo(DemoFunction::Sine, DEFAULT_SIGMA);
        for i in 0..20 {
            let r = run_trial(&cfg, trial_seed(42, i)).unwrap();
            assert!(r.in_family);
            let tol = r.lipschitz * r.step;
            assert!(r.denoised_error <= r.det_bound + tol, "{r:?}");
            assert!(r.pd_distance.unwrap() <= r.det_bound + tol, "{r:?}");
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = TrialConfig::sweep(80.0, 5.0, 3.0, 20.0, DEFAULT_SIGMA);
        assert_eq!(run_trial(&cfg, 9).unwrap(), run_trial(&cfg, 9).unwrap());
        assert_ne!(trial_seed(1, 0), trial_seed(1, 1));
        assert_ne!(trial_seed(1, 0), trial_seed(2, 0));
    }

    #[test]
    fn refinement_resolves_thin_bumps() {
        let noise = NoiseSpec::new(1.1, alloc::vec![Impulse::new(10.0, 100.0, 0.0)]).unwrap();
        let fine = resolution_step(&noise, 1.1, 100.0).unwrap();
        assert!((fine - 0.0005).abs() < 1e-12);
        assert!(resolution_step(&noise, 1.1, 120.0).is_none());
    }
}
