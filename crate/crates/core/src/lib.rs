//! Group-equivariant non-expansive operators for removing thin impulsive
//! noise from one-dimensional Lipschitz signals.
//!
//! Signals are piecewise-linear on a uniform grid ([`Signal`]). The operators
//! [`max_shift`], [`min_shift`] and their composite [`denoise`] are
//! equivariant under translations and reflection and non-expansive in the sup
//! norm. Noise is a finite sum of rescaled smooth bumps ([`NoiseSpec`]).
//! [`sublevel_pd0`] and [`bottleneck`] compare signals through their
//! degree-0 persistence diagrams, and [`bounds`] evaluates the error bounds.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod functions;
pub mod geneo;
pub mod matching;
pub mod noise;
pub mod persistence;
pub mod signal;
pub mod trial;

pub use error::{Error, Result};
pub use functions::{gen_lipschitz, random_lipschitz, DemoFunction, Polyline};
pub use geneo::{convolve_box, denoise, max_shift, min_shift, tau_schedule, ShiftParams};
pub use matching::{bottleneck, bottleneck_brute, point_delta, Assignment, MatchResult};
pub use noise::{Impulse, NoiseSampler, NoiseSpec};
pub use persistence::{sublevel_pd0, sublevel_pd0_values, Diagram, Interval};
pub use signal::{sup_dist_resampled, Combine, EdgePolicy, Grid, Signal};
pub use trial::{run_trial, trial_seed, TrialConfig, TrialRecord};
