use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geneo::experiments::{self, SimulationConfig, SweepConfig};
use geneo::io;
use geneo::svg::Plot;
use geneo::{Error, Result};
use geneo_core::bounds::{standard_bound, deterministic_bound, expected_bound, BoundInputs, BoundReport};
use geneo_core::noise::DEFAULT_SIGMA;
use geneo_core::trial::{realize_seeded, CleanSignal, NoiseLaw, Thinness, TrialConfig};
use geneo_core::{
    bottleneck, convolve_box, denoise, sublevel_pd0, Assignment, DemoFunction, EdgePolicy, NoiseSampler, ShiftParams,
    Signal,
};

/// Impulsive-noise removal with shift operators, persistence diagrams and
/// Monte Carlo validation of the error bounds.
#[derive(Parser)]
#[command(name = "geneo", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Grid spacing for generated signals.
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Support radius of the mother bump.
    #[arg(long, global = true, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    /// Output directory (default: $GENEO_OUT_DIR or the working directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Denoise a signal CSV or a demo signal.
    Denoise(DenoiseArgs),
    /// Degree-0 sublevel persistence diagram of a signal CSV.
    Pd {
        input: PathBuf,
        /// Output file (default: stdout).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Bottleneck distance between two diagram CSVs.
    Bottleneck {
        left: PathBuf,
        right: PathBuf,
        /// Also print an optimal matching as CSV.
        #[arg(long)]
        witness: bool,
    },
    /// Box-kernel convolution baseline.
    Convolve {
        /// Signal CSV or demo name (sine, quintic).
        input: String,
        #[arg(long)]
        h: f64,
        /// Output file (default: <out>/convolved.csv).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Deterministic and expected error bounds.
    Bounds(BoundsArgs),
    /// Overestimation histogram over repeated demo trials.
    Simulate {
        #[arg(long, default_value = "sine")]
        demo: DemoFunction,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        /// Worker threads (0: all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        svg: bool,
    },
    /// Mean errors and expected bound over an (alpha, beta, L) grid.
    Sweep {
        /// JSON file with SweepConfig fields; missing fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        trials_per_cell: Option<usize>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        svg: bool,
    },
}

#[derive(Args)]
struct DenoiseArgs {
    /// Signal CSV or demo name (sine, quintic).
    input: String,
    /// Noise JSON added to the input before denoising.
    #[arg(long)]
    noise: Option<PathBuf>,
    /// Add random noise drawn with the demo law (rejection eta > 8 sigma/beta).
    #[arg(long, conflicts_with = "noise")]
    random_noise: bool,
    /// Erosion radius; derived from beta when omitted.
    #[arg(long, requires = "delta")]
    epsilon: Option<f64>,
    /// Dilation radius.
    #[arg(long, requires = "epsilon")]
    delta: Option<f64>,
    /// Thinness for the automatic radii (2 sigma/beta, sigma/beta); defaults
    /// to the smallest squeeze of the noise.
    #[arg(long)]
    beta: Option<f64>,
    /// Clamp instead of zero-extend at the domain ends.
    #[arg(long)]
    clamp: bool,
    /// Output file (default: <out>/denoised.csv).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write an SVG overlay next to the output.
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long = "lipschitz", short = 'L')]
    lipschitz: f64,
    #[arg(long)]
    beta: f64,
    /// Minimum center separation (default 8 sigma/beta).
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Number of bumps for the expected bound.
    #[arg(long, short = 'k')]
    bumps: Option<u32>,
    #[arg(long, default_value_t = 20.0)]
    ell: f64,
    /// Largest absolute amplitude.
    #[arg(long, default_value_t = 100.0)]
    alpha: f64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_bad_input() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let out = g.out.clone().unwrap_or_else(io::default_out_dir);
    match cli.command {
        Command::Denoise(args) => run_denoise(g, &out, args),
        Command::Pd { input, output } => {
            let s = io::read_signal_file(&input, EdgePolicy::ZeroExtend)?;
            let d = sublevel_pd0(&s);
            match output {
                Some(p) => io::write_diagram(io::create(&p)?, &d),
                None => io::write_diagram(std::io::stdout().lock(), &d),
            }
        }
        Command::Bottleneck { left, right, witness } => {
            let a = io::read_diagram_file(&left)?;
            let b = io::read_diagram_file(&right)?;
            let m = bottleneck(&a, &b);
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{}", m.distance)?;
            if let (true, Some(w)) = (witness, m.witness.as_ref()) {
                write_witness(&mut stdout, &a, &b, w, &m.witness_costs(&a, &b).unwrap_or_default())?;
            }
            Ok(())
        }
        Command::Convolve { input, h, output } => {
            let s = load_input(&input, g.step, EdgePolicy::ZeroExtend)?;
            let c = convolve_box(&s, h)?;
            let path = output.unwrap_or_else(|| out.join("convolved.csv"));
            io::write_signal_file(&path, &c)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        Command::Bounds(args) => run_bounds(g, args),
        Command::Simulate { demo, trials, bins, threads, svg } => {
            let cfg = SimulationConfig { demo, trials, sigma: g.sigma, step: g.step, seed: g.seed, bins };
            let sim = experiments::run_histogram(&cfg, threads)?;
            let trials_path = out.join("trials.csv");
            io::write_trials(io::create(&trials_path)?, &sim.records)?;
            let hist_path = out.join("histogram.csv");
            io::write_histogram(io::create(&hist_path)?, &sim.histogram)?;
            if svg {
                let bars = sim.histogram.bins().map(|(l, r, c)| (l, r, c as f64)).collect();
                let plot = Plot::new(format!("{}: overestimation 3L sigma/beta - error", demo.name())).bars(bars);
                write_text(&out.join("histogram.svg"), &plot.render())?;
            }
            let low = sim.histogram.low_mass(0.2);
            eprintln!(
                "{} trials; {:.1}% in the lowest two bins; wrote {} and {}",
                sim.records.len(),
                100.0 * low,
                trials_path.display(),
                hist_path.display()
            );
            Ok(())
        }
        Command::Sweep { config, trials_per_cell, threads, svg } => {
            let mut cfg: SweepConfig = match config {
                Some(p) => serde_json::from_reader(io::open(&p)?)?,
                None => SweepConfig { sigma: g.sigma, seed: g.seed, ..Default::default() },
            };
            if let Some(n) = trials_per_cell {
                cfg.trials_per_cell = n;
            }
            if let Some(step) = g.step {
                cfg.step = step;
            }
            let sweep = experiments::run_sweep(&cfg, threads)?;
            let path = out.join("sweep.csv");
            io::write_sweep(io::create(&path)?, &sweep.rows)?;
            if svg {
                for var in ["alpha", "beta", "L"] {
                    let rows: Vec<_> = sweep.rows.iter().filter(|r| r.var == var).collect();
                    let pts = |f: fn(&experiments::SweepRow) -> f64| rows.iter().map(|r| (r.value, f(r))).collect();
                    let plot = Plot::new(format!("means over {var}"))
                        .line("raw error", pts(|r| r.mean_raw))
                        .line("expected bound", pts(|r| r.mean_bound))
                        .line("denoised error", pts(|r| r.mean_denoised));
                    write_text(&out.join(format!("sweep_{var}.svg")), &plot.render())?;
                }
            }
            eprintln!("{} trials; wrote {}", sweep.samples.len(), path.display());
            Ok(())
        }
    }
}

fn load_input(input: &str, step: Option<f64>, edge: EdgePolicy) -> Result<Signal> {
    match input.parse::<DemoFunction>() {
        Ok(demo) => Ok(experiments::demo_signal(demo, step)?.with_edge_policy(edge)),
        Err(_) => io::read_signal_file(Path::new(input), edge),
    }
}

fn run_denoise(g: &Global, out: &Path, args: DenoiseArgs) -> Result<()> {
    let edge = if args.clamp { EdgePolicy::ClampExtend } else { EdgePolicy::ZeroExtend };
    let (clean, noisy, noise_beta) = if args.random_noise {
        let demo: DemoFunction = args.input.parse()?;
        let w = demo.half_width();
        let cfg = TrialConfig {
            clean: CleanSignal::Demo(demo),
            noise: NoiseLaw::Sampled(NoiseSampler::demo(w, g.sigma)),
            sigma: g.sigma,
            step: g.step.unwrap_or(w / 4000.0),
            thinness: Thinness::Drawn,
            refine: g.step.is_none(),
            diagrams: false,
        };
        let r = realize_seeded(&cfg, g.seed)?;
        let beta = r.noise.beta();
        write_text(&out.join("noise.json"), &serde_json::to_string_pretty(&r.noise)?)?;
        (Some(r.clean.with_edge_policy(edge)), r.noisy.with_edge_policy(edge), Some(beta))
    } else {
        let base = load_input(&args.input, g.step, edge)?;
        match &args.noise {
            Some(path) => {
                let spec = io::read_noise_file(path)?;
                let noisy = base.add(&spec.render(*base.grid(), edge))?;
                (Some(base), noisy, Some(spec.beta()))
            }
            None => (None, base, None),
        }
    };
    let params = match (args.epsilon, args.delta) {
        (Some(e), Some(d)) => ShiftParams::new(e, d)?,
        _ => {
            let beta = args.beta.or(noise_beta.filter(|b| b.is_finite())).ok_or(geneo_core::Error::InvalidParameter(
                "give --epsilon/--delta, --beta, or noise to derive beta from",
            ))?;
            ShiftParams::for_noise(g.sigma, beta)?
        }
    };
    let denoised = denoise(&noisy, params)?;
    let path = args.output.unwrap_or_else(|| out.join("denoised.csv"));
    io::write_signal_file(&path, &denoised)?;
    eprintln!("epsilon = {}, delta = {}; wrote {}", params.epsilon, params.delta, path.display());
    if let Some(c) = &clean {
        eprintln!(
            "sup error: noisy {:.6}, denoised {:.6}",
            noisy.sup_dist(c)?,
            denoised.sup_dist(c)?
        );
    }
    if args.svg {
        let pts = |s: &Signal| s.grid().points().zip(s.values().iter().copied()).collect::<Vec<_>>();
        let mut plot = Plot::new("denoising").line("noisy", pts(&noisy)).line("denoised", pts(&denoised));
        if let Some(c) = &clean {
            plot = plot.line("clean", pts(c));
        }
        write_text(&path.with_extension("svg"), &plot.render())?;
    }
    Ok(())
}

fn run_bounds(g: &Global, a: BoundsArgs) -> Result<()> {
    let mut inp = BoundInputs::standard(a.lipschitz, g.sigma, a.beta);
    inp.theta = a.theta.unwrap_or(inp.theta);
    inp.epsilon = a.epsilon.unwrap_or(inp.epsilon);
    inp.delta = a.delta.unwrap_or(inp.delta);
    inp.ell = a.ell;
    inp.alpha_bar = a.alpha;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "standard 3 L sigma/beta = {}", standard_bound(a.lipschitz, g.sigma, a.beta))?;
    print_report(&mut stdout, "deterministic L (epsilon + delta)", &deterministic_bound(&inp))?;
    if let Some(k) = a.bumps {
        inp.bumps = k;
        print_report(&mut stdout, "expected", &expected_bound(&inp))?;
    }
    Ok(())
}

fn print_report(w: &mut impl Write, name: &str, r: &BoundReport) -> Result<()> {
    writeln!(w, "{name} = {} ({})", r.value, if r.valid { "valid" } else { "INVALID" })?;
    for v in &r.violations {
        writeln!(w, "  violated: {v}")?;
    }
    for n in &r.notes {
        writeln!(w, "  note: {n}")?;
    }
    Ok(())
}

fn write_witness(
    w: &mut impl Write,
    a: &geneo_core::Diagram,
    b: &geneo_core::Diagram,
    witness: &[Assignment],
    costs: &[f64],
) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["left_birth", "left_death", "right_birth", "right_death", "cost"])?;
    let fin = |d: &geneo_core::Diagram, i: usize| {
        let p = d.finite()[i];
        [p.birth.to_string(), p.death.to_string()]
    };
    let ess = |d: &geneo_core::Diagram, i: usize| [d.essential()[i].to_string(), "inf".to_string()];
    let diag = || [String::from("diagonal"), String::from("diagonal")];
    for (m, cost) in witness.iter().zip(costs) {
        let (l, r) = match *m {
            Assignment::Finite { left, right } => (fin(a, left), fin(b, right)),
            Assignment::LeftToDiagonal(i) => (fin(a, i), diag()),
            Assignment::RightToDiagonal(j) => (diag(), fin(b, j)),
            Assignment::Essential { left, right } => (ess(a, left), ess(b, right)),
        };
        csv.write_record(l.iter().chain(r.iter()).cloned().chain([cost.to_string()]))?;
    }
    csv.flush()?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = io::create(path)?;
    f.write_all(text.as_bytes()).map_err(|source| Error::File { path: path.to_owned(), source })?;
    f.flush()?;
    eprintln!("wrote {}", path.display());
    Ok(())
}
