//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
//! if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geneo::experiments::{baseline_errors, run_histogram, run_trials, SimulationConfig, BASELINE_WIDTHS};
use geneo_core::bounds::min_gap_prob;
use geneo_core::noise::{min_gap, Separation, DEFAULT_SIGMA};
use geneo_core::trial::{realize_seeded, trial_seed, uniform_points, CleanSignal, NoiseLaw, Thinness, TrialConfig};
use geneo_core::{
    bottleneck, bottleneck_brute, denoise, gen_lipschitz, max_shift, min_shift, sublevel_pd0, Diagram, DemoFunction,
    EdgePolicy, Grid, NoiseSampler, ShiftParams, Signal,
};

type Outcome = Result<String, String>;
type Op = Box<dyn Fn(&Signal) -> Signal>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    if took <= limit {
        Ok(took)
    } else {
        Err(format!("took {took:.2?}, limit {limit:?}"))
    }
}

fn persistence_ground_truth() -> Outcome {
    let start = Instant::now();
    let grid = Grid::spanning(0.0, 0.75 * PI, 1e-3).map_err(|e| e.to_string())?;
    let s = Signal::sample(grid, EdgePolicy::ZeroExtend, |x| 2.0 * x.sin()).map_err(|e| e.to_string())?;
    let d = sublevel_pd0(&s);
    let took = within(Duration::from_secs(1), start)?;
    let pairs: Vec<(f64, f64)> = d.pairs().collect();
    let ok = d.len() == 2
        && d.finite().len() == 1
        && d.essential()[0].abs() <= 1e-3
        && (d.finite()[0].birth - 2f64.sqrt()).abs() <= 1e-3
        && (d.finite()[0].death - 2.0).abs() <= 1e-3;
    check(ok, format!("diagram {pairs:?} in {took:.2?}"))
}

fn random_diagram(rng: &mut ChaCha8Rng, finite: usize, essential: usize) -> Diagram {
    // half of the diagrams use coarse integer coordinates to force ties
    let coarse = rng.random_bool(0.5);
    let coord = |rng: &mut ChaCha8Rng| {
        if coarse {
            rng.random_range(0..6) as f64
        } else {
            rng.random_range(-5.0..5.0)
        }
    };
    let mut pairs = Vec::new();
    for _ in 0..finite {
        let b = coord(rng);
        let p = coord(rng).abs() + if coarse { 1.0 } else { 0.0 };
        pairs.push((b, b + p));
    }
    for _ in 0..essential {
        pairs.push((coord(rng), f64::INFINITY));
    }
    Diagram::from_pairs(pairs).expect("valid points")
}

fn bottleneck_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let ess = rng.random_range(0..=2);
        let ess_b = if i % 10 == 0 { rng.random_range(0..=2) } else { ess };
        let fa = rng.random_range(0..=6 - ess);
        let a = random_diagram(&mut rng, fa, ess);
        let fb = rng.random_range(0..=6 - ess_b);
        let b = random_diagram(&mut rng, fb, ess_b);
        let fast = bottleneck(&a, &b).distance;
        let slow = bottleneck_brute(&a, &b).map_err(|e| e.to_string())?;
        let gap = if fast == slow { 0.0 } else { (fast - slow).abs() };
        if gap > 1e-12 {
            return Err(format!("pair {i}: {fast} vs {slow}"));
        }
        worst = worst.max(gap);
    }
    let took = within(Duration::from_secs(30), start)?;
    Ok(format!("1000 pairs, max difference {worst:e}, {took:.2?}"))
}

fn random_signal(rng: &mut ChaCha8Rng, grid: Grid) -> Signal {
    let n = grid.len();
    let values: Vec<f64> = match rng.random_range(0..3) {
        0 => (0..n).map(|_| rng.random_range(-10.0..10.0)).collect(),
        1 => {
            let mut v = 0.0;
            (0..n)
                .map(|_| {
                    v += rng.random_range(-1.0..1.0);
                    v
                })
                .collect()
        }
        _ => {
            let l = rng.random_range(0.5..5.0);
            let knots = rng.random_range(0..10);
            let s = gen_lipschitz(rng, l, knots, 10.0, 10.0 / (n - 1) as f64).expect("valid");
            s.values().iter().map(|v| v + if rng.random_bool(0.05) { rng.random_range(-20.0..20.0) } else { 0.0 }).collect()
        }
    };
    Signal::on_grid(grid, values, EdgePolicy::ZeroExtend).expect("finite")
}

fn stability_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    let mut slack = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.random_range(2..600);
        let grid = Grid::spanning(0.0, 10.0, 10.0 / (n - 1) as f64).expect("grid");
        let a = random_signal(&mut rng, grid);
        let b = if rng.random_bool(0.5) {
            a.map(|v| v + rng.random_range(-0.5..0.5))
        } else {
            random_signal(&mut rng, grid)
        };
        let d = bottleneck(&sublevel_pd0(&a), &sublevel_pd0(&b)).distance;
        let sup = a.sup_dist(&b).expect("shared grid");
        if d > sup + 1e-9 {
            violations += 1;
        }
        slack = slack.min(sup - d);
    }
    check(violations == 0, format!("200 pairs, {violations} violations, min sup - bottleneck {slack:.3e}"))
}

fn geneo_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = Vec::new();
    for i in 0..500 {
        let n = rng.random_range(2..400);
        let step = [0.01, 0.05, 0.1][i % 3];
        let pad = 200;
        let grid = Grid::new(-1.0, step, n + 2 * pad).expect("grid");
        // zero padding keeps translated copies on the grid
        let core = random_signal(&mut rng, Grid::new(0.0, step, n).expect("grid"));
        let mut v = vec![0.0; pad];
        v.extend_from_slice(core.values());
        v.extend(vec![0.0; pad]);
        let s = Signal::on_grid(grid, v, EdgePolicy::ZeroExtend).expect("finite");
        let other = random_signal(&mut rng, grid);
        let eps = rng.random_range(0.5 * step..60.0 * step);
        let delta = rng.random_range(0.5 * step..60.0 * step);
        let m = rng.random_range(-50i64..=50) as isize;
        let ops: [(&str, Op); 3] = [
            ("max_shift", Box::new(move |x: &Signal| max_shift(x, eps).expect("eps > 0"))),
            ("min_shift", Box::new(move |x: &Signal| min_shift(x, eps).expect("eps > 0"))),
            (
                "denoise",
                Box::new(move |x: &Signal| denoise(x, ShiftParams::new(eps, delta).expect("valid")).expect("valid")),
            ),
        ];
        for (name, op) in &ops {
            let fs = op(&s);
            if op(&other).sup_dist(&fs).expect("grid") > other.sup_dist(&s).expect("grid") {
                violations.push(format!("signal {i}: {name} expands"));
            }
            if op(&s.translate(m)).values() != fs.translate(m).values() {
                violations.push(format!("signal {i}: {name} not translation-equivariant"));
            }
            if op(&s.reflect()).values() != fs.reflect().values() {
                violations.push(format!("signal {i}: {name} not reflection-equivariant"));
            }
        }
        if min_shift(&s, eps).expect("eps").values() != max_shift(&s.negate(), eps).expect("eps").negate().values() {
            violations.push(format!("signal {i}: duality"));
        }
    }
    check(violations.is_empty(), format!("500 signals, {} violations {:?}", violations.len(), violations.first()))
}

fn upper_bound_in_family() -> Outcome {
    let start = Instant::now();
    let sine = TrialConfig::demo(DemoFunction::Sine, DEFAULT_SIGMA);
    let mut records = run_trials(&sine, 50, 250, 0).map_err(|e| e.to_string())?;
    let ell = 20.0;
    for j in 0..25u64 {
        let (alpha, beta, l) = (50.0 + 5.0 * (j % 11) as f64, 3.0 + (j % 11) as f64, 1.0 + (j % 10) as f64);
        let mut sampler = NoiseSampler::sweep(alpha, beta, ell, DEFAULT_SIGMA);
        sampler.separation = Separation::Fixed(8.0 * DEFAULT_SIGMA / beta);
        let cfg = TrialConfig {
            clean: CleanSignal::RandomLipschitz { lipschitz: l, knots: (1, 10), ell },
            noise: NoiseLaw::Sampled(sampler),
            sigma: DEFAULT_SIGMA,
            step: ell / 4000.0,
            thinness: Thinness::Nominal(beta),
            refine: true,
            diagrams: true,
        };
        records.extend(run_trials(&cfg, 5000 + j, 10, 0).map_err(|e| e.to_string())?);
    }
    let took = within(Duration::from_secs(120), start)?;
    let mut bad = Vec::new();
    let mut tightest = f64::INFINITY;
    for r in &records {
        let tol = r.lipschitz * r.step;
        let pd = r.pd_distance.unwrap_or(f64::INFINITY);
        if !r.in_family || r.denoised_error > r.det_bound + tol || pd > r.det_bound + tol {
            bad.push(r.seed);
        }
        tightest = tightest.min(r.det_bound - r.denoised_error);
    }
    check(
        bad.is_empty() && records.len() == 500,
        format!(
            "{} trials, {} violations (seeds {:?}), min bound - error {tightest:.3e}, {took:.2?}",
            records.len(),
            bad.len(),
            &bad[..bad.len().min(5)]
        ),
    )
}

fn min_gap_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let draws = 100_000;
    let mut worst = 0.0f64;
    for (k, ell) in [(3usize, 10.0), (5, 20.0), (10, 20.0)] {
        let top = ell / (k - 1) as f64;
        for j in 1..=5 {
            let eta = top * j as f64 / 6.0;
            let p = min_gap_prob(k as u32, ell, eta);
            let hits = (0..draws).filter(|_| min_gap(&uniform_points(&mut rng, k, ell)) > eta).count();
            let emp = hits as f64 / draws as f64;
            let se = (p * (1.0 - p) / draws as f64).sqrt().max(1.0 / draws as f64);
            let z = (emp - p).abs() / se;
            if z > 3.0 {
                return Err(format!("k={k} ell={ell} eta={eta}: empirical {emp} vs {p} ({z:.2} se)"));
            }
            worst = worst.max(z);
        }
        let edges = [
            min_gap_prob(k as u32, ell, 0.0) == 1.0,
            min_gap_prob(k as u32, ell, -1.0) == 1.0,
            min_gap_prob(k as u32, ell, top) == 0.0,
            min_gap_prob(k as u32, ell, 2.0 * top) == 0.0,
        ];
        if edges.contains(&false) {
            return Err(format!("boundary values wrong for k={k}: {edges:?}"));
        }
    }
    Ok(format!("15 laws at 1e5 draws, largest deviation {worst:.2} standard errors"))
}

fn expected_error_bound() -> Outcome {
    let (l, sigma, beta, ell) = (1.0, DEFAULT_SIGMA, 11.0, 20.0);
    let amplitudes = [80.0, -60.0, 100.0, -45.0, 70.0];
    let mut lines = Vec::new();
    let mut ok = true;
    for k in 2..=5usize {
        let amps = amplitudes[..k].to_vec();
        let alpha_bar = amps.iter().fold(0.0f64, |m, a: &f64| m.max(a.abs()));
        let cfg = TrialConfig::uniform_centers(l, amps, beta, ell, sigma);
        let records = run_trials(&cfg, 700 + k as u64, 500, 0).map_err(|e| e.to_string())?;
        let errs: Vec<f64> = records.iter().map(|r| r.denoised_error).collect();
        let n = errs.len() as f64;
        let mean = errs.iter().sum::<f64>() / n;
        let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let s = sigma / beta;
        let kf = k as f64;
        let bound = 3.0 * l * s + kf * alpha_bar * (1.0 - (1.0 - 8.0 * (kf - 1.0) * s / ell).powi(k as i32));
        let step = records.iter().map(|r| r.step).fold(0.0, f64::max);
        let limit = bound + l * step + 3.0 * (var / n).sqrt();
        ok &= mean <= limit;
        lines.push(format!("k={k}: mean {mean:.4} <= {limit:.4}"));
    }
    check(ok, lines.join("; "))
}

fn baseline_dominance() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for demo in [DemoFunction::Sine, DemoFunction::Quintic] {
        let cfg = TrialConfig::demo(demo, DEFAULT_SIGMA);
        for seed in 0..3 {
            let r = realize_seeded(&cfg, trial_seed(80, seed)).map_err(|e| e.to_string())?;
            let geneo = r.denoised.sup_dist(&r.clean).map_err(|e| e.to_string())?;
            let conv = baseline_errors(&r.noisy, &r.clean, &BASELINE_WIDTHS).map_err(|e| e.to_string())?;
            let (h, best) = conv.iter().copied().fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            ok &= best > geneo;
            lines.push(format!("{} #{seed}: GENEO {geneo:.4} vs best box h={h:.3} {best:.4}", demo.name()));
        }
    }
    check(ok, lines.join("; "))
}

fn histogram_shape() -> Outcome {
    let sim = run_histogram(&SimulationConfig::default(), 0).map_err(|e| e.to_string())?;
    let low = sim.histogram.low_mass(0.2);
    let negative = sim.records.iter().filter(|r| r.overestimation() < -r.lipschitz * r.step).count();
    check(
        low >= 0.5 && negative == 0 && sim.records.len() == 1000,
        format!(
            "{:.1}% of 1000 trials in the lowest 20% of [{:.4}, {:.4}], {negative} below -L*step, counts {:?}",
            100.0 * low,
            sim.histogram.lo,
            sim.histogram.hi,
            sim.histogram.counts
        ),
    )
}

fn run_cli(out: &Path, args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_geneo"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "error")
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(format!("geneo {args:?}: {}", String::from_utf8_lossy(&status.stderr)))
    }
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = tmp.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{"alpha_set": [50, 100], "beta_set": [3, 8, 13], "L_set": [1, 5], "trials_per_cell": 4, "seed": 11}"#,
    )
    .map_err(|e| e.to_string())?;
    let config = config.to_str().expect("utf-8 path");
    let runs = [("a", "1"), ("b", "1"), ("c", "4")];
    for (dir, threads) in runs {
        let out = tmp.path().join(dir);
        run_cli(&out, &["simulate", "--trials", "40", "--seed", "9", "--threads", threads])?;
        run_cli(&out, &["sweep", "--config", config, "--threads", threads])?;
    }
    let mut compared = 0;
    for file in ["trials.csv", "histogram.csv", "sweep.csv"] {
        let read = |d: &str| std::fs::read(tmp.path().join(d).join(file)).map_err(|e| e.to_string());
        let (a, b, c) = (read("a")?, read("b")?, read("c")?);
        if a != b || a != c {
            return Err(format!("{file} differs between runs"));
        }
        compared += a.len();
    }
    Ok(format!("trials.csv, histogram.csv, sweep.csv identical over 2 runs and 1 vs 4 threads ({compared} bytes)"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("persistence ground truth", persistence_ground_truth),
        ("bottleneck oracle equivalence", bottleneck_oracle),
        ("stability", stability_suite),
        ("GENEO axioms", geneo_axioms),
        ("deterministic bound in family", upper_bound_in_family),
        ("min-gap law", min_gap_law),
        ("expected-error bound", expected_error_bound),
        ("baseline dominance", baseline_dominance),
        ("histogram shape", histogram_shape),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name} [{:.2?}]: {detail}", i + 1, start.elapsed());
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
