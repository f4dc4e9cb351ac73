//! Closed-form error guarantees for [`denoise`](crate::geneo::denoise).
//!
//! All functions are plain arithmetic. Preconditions are reported through
//! [`BoundReport::valid`] and [`BoundReport::violations`] instead of errors so
//! that parameter sweeps can tabulate infeasible cells.

use alloc::vec::Vec;

/// Parameters shared by the deterministic and the expected-error bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundInputs {
    /// Lipschitz constant of the clean signal.
    pub lipschitz: f64,
    /// Support radius bound of the mother bump.
    pub sigma: f64,
    /// Lower bound on the bump squeeze factors.
    pub beta: f64,
    /// Guaranteed minimum distance between bump centers.
    pub theta: f64,
    /// Number of bumps.
    pub bumps: u32,
    /// Length of the interval the bump centers are drawn from.
    pub ell: f64,
    /// Largest absolute bump amplitude.
    pub alpha_bar: f64,
    pub epsilon: f64,
    pub delta: f64,
}

impl BoundInputs {
    /// Inputs with the shift radii set to `(2 sigma/beta, sigma/beta)` and the
    /// center gap to its smallest admissible value `8 sigma/beta`.
    pub fn standard(lipschitz: f64, sigma: f64, beta: f64) -> Self {
        let t = sigma / beta;
        BoundInputs {
            lipschitz,
            sigma,
            beta,
            theta: 8.0 * t,
            bumps: 1,
            ell: 1.0,
            alpha_bar: 0.0,
            epsilon: 2.0 * t,
            delta: t,
        }
    }

    pub fn thinness(&self) -> f64 {
        self.sigma / self.beta
    }
}

/// A precondition that did not hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// A parameter that must be positive (or non-negative) is not.
    NotPositive(&'static str),
    /// `theta < 8 sigma/beta`: no admissible `epsilon` exists.
    GapTooSmall,
    /// `epsilon < 2 sigma/beta`.
    EpsilonTooSmall,
    /// `epsilon > theta/2 - 2 sigma/beta`.
    EpsilonTooLarge,
    /// `delta < sigma/beta`.
    DeltaTooSmall,
    /// `delta > min(theta - 2 epsilon, 2 epsilon)/2 - sigma/beta`.
    DeltaTooLarge,
    /// `sigma/beta >= ell / (8 (k - 1))`.
    TooCoarseForInterval,
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Violation::NotPositive(name) => write!(f, "{name} must be positive"),
            Violation::GapTooSmall => f.write_str("theta < 8 sigma/beta"),
            Violation::EpsilonTooSmall => f.write_str("epsilon < 2 sigma/beta"),
            Violation::EpsilonTooLarge => f.write_str("epsilon > theta/2 - 2 sigma/beta"),
            Violation::DeltaTooSmall => f.write_str("delta < sigma/beta"),
            Violation::DeltaTooLarge => f.write_str("delta > min(theta - 2 epsilon, 2 epsilon)/2 - sigma/beta"),
            Violation::TooCoarseForInterval => f.write_str("sigma/beta >= ell / (8 (k - 1))"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub value: f64,
    pub valid: bool,
    pub violations: Vec<Violation>,
    pub notes: Vec<&'static str>,
}

impl BoundReport {
    fn from_checks(value: f64, violations: Vec<Violation>) -> Self {
        BoundReport { value, valid: violations.is_empty(), violations, notes: Vec::new() }
    }
}

/// Relative slack on the closed inequalities, so that boundary parameter
/// choices computed in floating point are not rejected.
const SLACK: f64 = 1e-12;

fn le(a: f64, b: f64) -> bool {
    a <= b + SLACK * a.abs().max(b.abs()).max(1.0)
}

fn positivity(inp: &BoundInputs, out: &mut Vec<Violation>) {
    let checks: [(&'static str, bool); 4] = [
        ("lipschitz", inp.lipschitz >= 0.0),
        ("sigma", inp.sigma > 0.0),
        ("beta", inp.beta > 0.0),
        ("alpha_bar", inp.alpha_bar >= 0.0),
    ];
    out.extend(checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| Violation::NotPositive(n)));
}

/// `L (epsilon + delta)`, valid when
/// `2s <= epsilon <= theta/2 - 2s` and
/// `s <= delta <= min(theta - 2 epsilon, 2 epsilon)/2 - s`, `s = sigma/beta`.
pub fn deterministic_bound(inp: &BoundInputs) -> BoundReport {
    let mut v = Vec::new();
    positivity(inp, &mut v);
    for (name, x) in [("theta", inp.theta), ("epsilon", inp.epsilon), ("delta", inp.delta)] {
        if !(x > 0.0) {
            v.push(Violation::NotPositive(name));
        }
    }
    let s = inp.thinness();
    if !le(8.0 * s, inp.theta) {
        v.push(Violation::GapTooSmall);
    }
    if !le(2.0 * s, inp.epsilon) {
        v.push(Violation::EpsilonTooSmall);
    }
    if !le(inp.epsilon, inp.theta / 2.0 - 2.0 * s) {
        v.push(Violation::EpsilonTooLarge);
    }
    if !le(s, inp.delta) {
        v.push(Violation::DeltaTooSmall);
    }
    let delta_max = 0.5 * (inp.theta - 2.0 * inp.epsilon).min(2.0 * inp.epsilon) - s;
    if !le(inp.delta, delta_max) {
        v.push(Violation::DeltaTooLarge);
    }
    BoundReport::from_checks(inp.lipschitz * (inp.epsilon + inp.delta), v)
}

/// `3 L sigma / beta`.
pub fn standard_bound(lipschitz: f64, sigma: f64, beta: f64) -> f64 {
    3.0 * lipschitz * sigma / beta
}

/// Probability that `k` independent uniform points on `[0, ell]` are
/// pairwise more than `eta` apart: `(1 - (k-1) eta/ell)^k` on
/// `0 < eta < ell/(k-1)`, 1 below and 0 above that range. For `k <= 1`
/// there is no pair and the probability is 1.
pub fn min_gap_prob(k: u32, ell: f64, eta: f64) -> f64 {
    if k <= 1 || eta <= 0.0 {
        return 1.0;
    }
    let km1 = (k - 1) as f64;
    if eta >= ell / km1 {
        return 0.0;
    }
    libm::pow(1.0 - km1 * eta / ell, k as f64)
}

/// Bound on the expected error when the `k` bump centers are independent
/// and uniform on `[0, ell]`:
/// `3 L s + k alpha_bar (1 - p)`, `p = min_gap_prob(k, ell, 8 s)`,
/// `s = sigma/beta`, valid for `k >= 2` and `s < ell / (8 (k-1))`.
///
/// When only the interval condition fails the returned value is still an
/// upper bound (then `p = 0` and the value is the worst case
/// `3 L s + k alpha_bar`), but the report is marked invalid.
pub fn expected_bound(inp: &BoundInputs) -> BoundReport {
    let mut v = Vec::new();
    positivity(inp, &mut v);
    if !(inp.ell > 0.0) {
        v.push(Violation::NotPositive("ell"));
    }
    if inp.bumps == 0 {
        v.push(Violation::NotPositive("bumps"));
    }
    let s = inp.thinness();
    let base = standard_bound(inp.lipschitz, inp.sigma, inp.beta);
    if inp.bumps == 1 {
        let mut r = BoundReport::from_checks(base, v);
        r.notes.push("single bump: the separation event always holds");
        return r;
    }
    let k = inp.bumps;
    if inp.bumps >= 2 && !(s < inp.ell / (8.0 * (k - 1) as f64)) {
        v.push(Violation::TooCoarseForInterval);
    }
    let p = min_gap_prob(k, inp.ell, 8.0 * s);
    BoundReport::from_checks(base + k as f64 * inp.alpha_bar * (1.0 - p), v)
}

/// The same right-hand side as [`expected_bound`], read as a bound on the
/// expected bottleneck distance between the diagrams of the clean and the
/// denoised signal.
pub fn matching_expected_bound(inp: &BoundInputs) -> BoundReport {
    let mut r = expected_bound(inp);
    r.notes.push("bottleneck distance is 1-Lipschitz in sup-norm");
    r
}
