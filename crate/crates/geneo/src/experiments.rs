//! Monte Carlo experiments: batches of seeded trials, overestimation
//! histograms, the three-parameter sweep and the convolution baseline.
//!
//! Trial `i` of a batch seeded with `s` always uses seed
//! `trial_seed(s, i)` and results are collected in index order, so every
//! output is independent of the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use geneo_core::bounds::{expected_bound, BoundInputs};
use geneo_core::noise::DEFAULT_SIGMA;
use geneo_core::trial::{run_trial, trial_seed, TrialConfig, TrialRecord};
use geneo_core::{convolve_box, DemoFunction, Signal};

use crate::error::Result;

/// Runs `f` on a pool of `threads` workers (`0` picks the rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(f))
}

/// Trials `0..n` of `cfg` seeded from `seed`, in index order.
pub fn run_trials(cfg: &TrialConfig, seed: u64, n: usize, threads: usize) -> Result<Vec<TrialRecord>> {
    let records = with_threads(threads, || {
        (0..n as u64)
            .into_par_iter()
            .map(|i| run_trial(cfg, trial_seed(seed, i)))
            .collect::<geneo_core::Result<Vec<_>>>()
    })??;
    Ok(records)
}

/// Equal-width histogram over the observed range.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// `bins` equal bins spanning `[min, max]` of `values`; empty input gives
    /// an empty histogram.
    pub fn from_values(values: &[f64], bins: usize) -> Self {
        if values.is_empty() || bins == 0 {
            return Histogram { lo: 0.0, hi: 0.0, counts: Vec::new() };
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0; bins];
        for &v in values {
            let i = if width > 0.0 { ((v - lo) / width) as usize } else { 0 };
            counts[i.min(bins - 1)] += 1;
        }
        Histogram { lo, hi, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `(lo, hi, count)` for each bin.
    pub fn bins(&self) -> impl Iterator<Item = (f64, f64, usize)> + '_ {
        let n = self.counts.len();
        let width = if n > 0 { (self.hi - self.lo) / n as f64 } else { 0.0 };
        self.counts.iter().enumerate().map(move |(i, &c)| {
            let hi = if i + 1 == n { self.hi } else { self.lo + (i + 1) as f64 * width };
            (self.lo + i as f64 * width, hi, c)
        })
    }

    /// Share of the mass in the lowest `fraction` of the bins.
    pub fn low_mass(&self, fraction: f64) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        let k = (fraction * self.counts.len() as f64).round() as usize;
        self.counts[..k].iter().sum::<usize>() as f64 / self.total() as f64
    }
}

/// Settings of the overestimation histogram on a demo signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub demo: DemoFunction,
    pub trials: usize,
    pub sigma: f64,
    /// Grid spacing; `half_width / 4000` when absent.
    pub step: Option<f64>,
    pub seed: u64,
    pub bins: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig { demo: DemoFunction::Sine, trials: 1000, sigma: DEFAULT_SIGMA, step: None, seed: 0, bins: 10 }
    }
}

impl SimulationConfig {
    pub fn trial_config(&self) -> TrialConfig {
        let mut cfg = TrialConfig::demo(self.demo, self.sigma);
        if let Some(step) = self.step {
            cfg.step = step;
        }
        cfg
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub records: Vec<TrialRecord>,
    /// Histogram of `det_bound - denoised_error`.
    pub histogram: Histogram,
}

/// Runs the demo trials with rejection of overlapping noise and bins the
/// overestimation of the error by the deterministic bound.
pub fn run_histogram(cfg: &SimulationConfig, threads: usize) -> Result<Simulation> {
    let records = run_trials(&cfg.trial_config(), cfg.seed, cfg.trials, threads)?;
    let over: Vec<f64> = records.iter().map(TrialRecord::overestimation).collect();
    Ok(Simulation { histogram: Histogram::from_values(&over, cfg.bins), records })
}

/// Grid of `(alpha, beta, L)` values, each cell run `trials_per_cell` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub alpha_set: Vec<f64>,
    pub beta_set: Vec<f64>,
    #[serde(rename = "L_set")]
    pub l_set: Vec<f64>,
    pub trials_per_cell: usize,
    pub ell: f64,
    pub sigma: f64,
    pub step: f64,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let ell = 20.0;
        SweepConfig {
            alpha_set: (0..=10).map(|i| 50.0 + 5.0 * i as f64).collect(),
            beta_set: (3..=13).map(f64::from).collect(),
            l_set: (1..=10).map(f64::from).collect(),
            trials_per_cell: 100,
            ell,
            sigma: DEFAULT_SIGMA,
            step: ell / 4000.0,
            seed: 0,
        }
    }
}

/// One trial of the sweep together with its cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSample {
    pub alpha: f64,
    pub beta: f64,
    pub lipschitz: f64,
    pub bumps: usize,
    pub raw_error: f64,
    pub denoised_error: f64,
    /// Expected-error bound for the trial's bump count and the cell's alpha.
    pub bound: f64,
}

impl SweepSample {
    fn coordinate(&self, var: &str) -> f64 {
        match var {
            "alpha" => self.alpha,
            "beta" => self.beta,
            _ => self.lipschitz,
        }
    }
}

/// Mean of the three curves at one value of one swept variable, averaged
/// over all cells and trials with that value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub var: &'static str,
    pub value: f64,
    pub mean_raw: f64,
    pub mean_denoised: f64,
    pub mean_bound: f64,
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub samples: Vec<SweepSample>,
    pub rows: Vec<SweepRow>,
}

pub fn run_sweep(cfg: &SweepConfig, threads: usize) -> Result<Sweep> {
    let mut cells = Vec::new();
    for &alpha in &cfg.alpha_set {
        for &beta in &cfg.beta_set {
            for &l in &cfg.l_set {
                cells.push((alpha, beta, l));
            }
        }
    }
    let per = cfg.trials_per_cell;
    let samples = with_threads(threads, || {
        (0..cells.len() * per)
            .into_par_iter()
            .map(|idx| {
                let (alpha, beta, l) = cells[idx / per];
                let mut tc = TrialConfig::sweep(alpha, beta, l, cfg.ell, cfg.sigma);
                tc.step = cfg.step;
                let r = run_trial(&tc, trial_seed(cfg.seed, idx as u64))?;
                let inputs = BoundInputs {
                    bumps: r.bumps as u32,
                    ell: cfg.ell,
                    alpha_bar: alpha,
                    ..BoundInputs::standard(l, cfg.sigma, beta)
                };
                Ok(SweepSample {
                    alpha,
                    beta,
                    lipschitz: l,
                    bumps: r.bumps,
                    raw_error: r.raw_error,
                    denoised_error: r.denoised_error,
                    bound: expected_bound(&inputs).value,
                })
            })
            .collect::<geneo_core::Result<Vec<_>>>()
    })??;

    let mut rows = Vec::new();
    for (var, values) in [("alpha", &cfg.alpha_set), ("beta", &cfg.beta_set), ("L", &cfg.l_set)] {
        for &value in values {
            let (mut n, mut raw, mut den, mut bound) = (0usize, 0.0, 0.0, 0.0);
            for s in samples.iter().filter(|s| s.coordinate(var) == value) {
                n += 1;
                raw += s.raw_error;
                den += s.denoised_error;
                bound += s.bound;
            }
            let m = n.max(1) as f64;
            rows.push(SweepRow { var, value, mean_raw: raw / m, mean_denoised: den / m, mean_bound: bound / m });
        }
    }
    Ok(Sweep { samples, rows })
}

/// Kernel parameters of the convolution baseline.
pub const BASELINE_WIDTHS: [f64; 8] = [3.0, 5.0, 20.0, 100.0, 1.0 / 3.0, 1.0 / 5.0, 1.0 / 20.0, 1.0 / 100.0];

/// `(h, sup |noisy * T_h - clean|)` for each `h`.
pub fn baseline_errors(noisy: &Signal, clean: &Signal, widths: &[f64]) -> Result<Vec<(f64, f64)>> {
    widths
        .iter()
        .map(|&h| Ok((h, convolve_box(noisy, h)?.sup_dist(clean)?)))
        .collect()
}

/// Samples a demo on its support with the default spacing.
pub fn demo_signal(demo: DemoFunction, step: Option<f64>) -> Result<Signal> {
    Ok(demo.sample(step.unwrap_or(demo.half_width() / 4000.0))?)
}
