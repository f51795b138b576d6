use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use homs::oracle::Moments;
use homs::signals::{add_noise, generate, random_pw_poly, true_partition, SignalKind};
use homs::{rand_index, rel_l2_error, ErrorEngine, ModelParams, Partition, Pruning, RotationTable, Signal, Solver};
use rayon::prelude::*;

mod csv;
mod grid;

use csv::num;

#[derive(Parser)]
#[command(name = "homs", version, about = "Piecewise smooth and piecewise polynomial segmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment and smooth a signal.
    Smooth(SmoothArgs),
    /// Pick (beta, gamma) on a grid against a known ground truth.
    Gridsearch(GridArgs),
    /// Write a test signal, a noisy copy and its true segments.
    Generate(GenerateArgs),
    /// Approximation errors on polynomial input.
    Stability(StabilityArgs),
    /// Runtime and error-update counts for growing signal sizes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Elasticity; "inf" for Potts mode.
    #[arg(long, default_value = "1")]
    beta: f64,
    /// Same as --beta inf.
    #[arg(long)]
    potts: bool,
}

impl ModelArgs {
    fn beta(&self) -> f64 {
        if self.potts {
            f64::INFINITY
        } else {
            self.beta
        }
    }
}

#[derive(Args)]
struct SmoothArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value = "both")]
    pruning: Pruning,
    /// Estimate CSV.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Segments CSV.
    #[arg(long)]
    segments: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Objective {
    #[value(name = "rel_l2", alias = "rel-l2")]
    RelL2,
    Rand,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    input: PathBuf,
    /// Clean ground-truth signal.
    #[arg(long)]
    truth: PathBuf,
    /// Ground-truth segments; needed for the Rand index.
    #[arg(long)]
    truth_segments: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value = "0.001:0.001:1")]
    gammas: String,
    #[arg(long, default_value = "0.025:0.025:25,inf")]
    betas: String,
    /// Shorthand for --betas inf.
    #[arg(long)]
    potts: bool,
    #[arg(long, value_enum, default_value = "rel_l2")]
    objective: Objective,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    segments: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Heavysine,
    Blocks,
    #[value(name = "pw_smooth", alias = "pw-smooth")]
    PwSmooth,
    #[value(name = "pw_poly", alias = "pw-poly")]
    PwPoly,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long)]
    n: usize,
    /// Noise level relative to the mean absolute amplitude.
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Jump probability per sample (pw_poly).
    #[arg(long, default_value_t = 0.01)]
    p: f64,
    /// Pieces are polynomials of degree < k (pw_poly).
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Output prefix; writes PREFIX_clean.csv, PREFIX_noisy.csv, PREFIX_segments.csv.
    #[arg(long)]
    output: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StabilityMode {
    Spline,
    Poly,
    Moments,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, value_enum)]
    mode: StabilityMode,
    /// Elasticity for spline mode.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scenario {
    #[value(name = "pw_poly", alias = "pw-poly")]
    PwPoly,
    #[value(name = "fixed_jumps", alias = "fixed-jumps")]
    FixedJumps,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    scenario: Scenario,
    /// Comma separated sizes; defaults depend on the scenario.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 0.01)]
    p: f64,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "both")]
    pruning: Pruning,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn smooth(a: &SmoothArgs) -> Result<()> {
    let f = csv::read_signal(&a.input)?;
    let params = ModelParams::new(a.model.k, a.model.beta(), a.gamma)?;
    let res = homs::solve(&f, &params, a.pruning)?;
    if let Some(p) = &a.output {
        csv::write_signal(p, None, &res.estimate)?;
    }
    if let Some(p) = &a.segments {
        csv::write_segments(p, &res.partition)?;
    }
    println!("energy={}", num(res.energy));
    println!("segments={}", res.partition.len());
    println!("error_updates={}", res.num_error_updates);
    Ok(())
}

struct GridPoint {
    beta: f64,
    gamma: f64,
    rel_l2: f64,
    rand: Option<f64>,
    estimate: Signal,
    partition: Partition,
}

impl GridPoint {
    fn score(&self, objective: Objective) -> f64 {
        match objective {
            Objective::RelL2 => self.rel_l2,
            Objective::Rand => -self.rand.expect("rand objective needs truth segments"),
        }
    }
}

fn gridsearch(a: &GridArgs) -> Result<()> {
    let f = csv::read_signal(&a.input)?;
    let g = csv::read_signal(&a.truth)?;
    ensure!(
        f.len() == g.len(),
        "input has {} samples but truth has {}",
        f.len(),
        g.len()
    );
    let truth_part = a.truth_segments.as_deref().map(|p| csv::read_segments(p, f.len())).transpose()?;
    if a.objective == Objective::Rand && truth_part.is_none() {
        bail!("--objective rand needs --truth-segments");
    }
    let gammas = grid::parse_grid(&a.gammas).context("--gammas")?;
    let betas = if a.potts {
        vec![f64::INFINITY]
    } else {
        grid::parse_grid(&a.betas).context("--betas")?
    };
    for &b in &betas {
        ModelParams::new(a.k, b, 1.0)?;
    }
    for &gm in &gammas {
        ModelParams::new(a.k, 1.0, gm)?;
    }

    let mut best: Option<GridPoint> = None;
    for &beta in &betas {
        let solver = Solver::new(a.k, beta, f.len())?;
        let points: Vec<GridPoint> = gammas
            .par_iter()
            .map(|&gamma| -> Result<GridPoint> {
                let res = solver.solve(&f, gamma, Pruning::Both)?;
                Ok(GridPoint {
                    beta,
                    gamma,
                    rel_l2: rel_l2_error(&res.estimate, &g)?,
                    rand: truth_part.as_ref().map(|t| rand_index(&res.partition, t)).transpose()?,
                    estimate: res.estimate,
                    partition: res.partition,
                })
            })
            .collect::<Result<_>>()?;
        for p in points {
            let better = match &best {
                None => true,
                Some(b) => {
                    let (s, t) = (p.score(a.objective), b.score(a.objective));
                    s < t || (s == t && (p.gamma, p.beta) < (b.gamma, b.beta))
                }
            };
            if better {
                best = Some(p);
            }
        }
    }

    let best = best.expect("grids are non-empty");
    if let Some(p) = &a.output {
        csv::write_signal(p, None, &best.estimate)?;
    }
    if let Some(p) = &a.segments {
        csv::write_segments(p, &best.partition)?;
    }
    println!("evaluated={}", betas.len() * gammas.len());
    println!("best_beta={}", best.beta);
    println!("best_gamma={}", best.gamma);
    println!("rel_l2={}", num(best.rel_l2));
    if let Some(r) = best.rand {
        println!("rand={}", num(r));
    }
    println!("segments={}", best.partition.len());
    Ok(())
}

fn generate_cmd(a: &GenerateArgs) -> Result<()> {
    let (clean, part) = match a.kind {
        GenKind::PwPoly => random_pw_poly(a.n, a.p, a.k, a.seed)?,
        kind => {
            let kind = match kind {
                GenKind::Heavysine => SignalKind::HeavySine,
                GenKind::Blocks => SignalKind::Blocks,
                _ => SignalKind::PwSmooth,
            };
            (generate(kind, a.n)?, true_partition(kind, a.n)?)
        }
    };
    let noisy = add_noise(&clean, a.eta, a.seed)?;
    let kind = a.kind.to_possible_value().expect("no skipped variants").get_name().to_string();
    let header = format!("# kind={kind} n={} eta={} seed={}", a.n, a.eta, a.seed);
    let path = |suffix: &str| PathBuf::from(format!("{}_{suffix}.csv", a.output));
    csv::write_signal(&path("clean"), Some(&header), &clean)?;
    csv::write_signal(&path("noisy"), Some(&header), &noisy)?;
    csv::write_segments(&path("segments"), &part)?;
    println!("seed={}", a.seed);
    println!("samples={}", a.n);
    println!("segments={}", part.len());
    Ok(())
}

/// `100 (n / 100)^(k-1)`: degree `k - 1`, so every error is zero in exact arithmetic.
fn polynomial_input(k: usize, n: usize) -> Result<Signal> {
    Ok(Signal::new(
        (1..=n).map(|i| 100.0 * (i as f64 / 100.0).powi(k as i32 - 1)).collect(),
    )?)
}

fn stability(a: &StabilityArgs) -> Result<()> {
    let n = a.n;
    let f = polynomial_input(a.k, n)?;
    let (prefix, suffix): (Vec<f64>, Vec<f64>) = match a.mode {
        StabilityMode::Moments => {
            let m = Moments::new(&f, a.k)?;
            (
                (1..=n).map(|r| m.eps(1, r)).collect::<homs::Result<_>>()?,
                (1..=n).map(|l| m.eps(l, n)).collect::<homs::Result<_>>()?,
            )
        }
        mode => {
            let table = if mode == StabilityMode::Poly {
                RotationTable::poly(a.k, n)?
            } else {
                ensure!(a.beta.is_finite(), "spline mode needs a finite --beta");
                RotationTable::spline(a.k, a.beta, n)?
            };
            let engine = ErrorEngine::new(&table, &f)?;
            (
                engine.errors_from(1)?,
                (1..=n).map(|l| engine.error(l, n)).collect::<homs::Result<_>>()?,
            )
        }
    };
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| vec![(i + 1).to_string(), num(prefix[i]), num(suffix[i])])
        .collect();
    csv::write_table(a.output.as_deref(), "index,prefix_error,suffix_error", &rows)?;

    let norm = f.norm_sq();
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    println!("norm_sq={}", num(norm));
    println!("max_prefix={}", num(max_abs(&prefix)));
    println!("max_suffix={}", num(max_abs(&suffix)));
    println!("max_relative={}", num(max_abs(&prefix).max(max_abs(&suffix)) / norm));
    Ok(())
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

fn bench_signal(a: &BenchArgs, n: usize, rep: u64) -> Result<Signal> {
    let seed = a.seed.wrapping_add(rep);
    let clean = match a.scenario {
        Scenario::PwPoly => random_pw_poly(n, a.p, a.model.k, seed)?.0,
        Scenario::FixedJumps => generate(SignalKind::PwSmooth, n)?,
    };
    Ok(add_noise(&clean, a.eta, seed ^ 0x5eed_0000_0000)?)
}

fn bench(a: &BenchArgs) -> Result<()> {
    ensure!(a.reps > 0, "--reps must be positive");
    let sizes = if a.sizes.is_empty() {
        match a.scenario {
            Scenario::PwPoly => vec![1000, 2000, 4000, 7000, 10000],
            Scenario::FixedJumps => (9..=13).map(|e| 1 << e).collect(),
        }
    } else {
        a.sizes.clone()
    };
    ensure!(sizes.iter().all(|&n| n > 0), "sizes must be positive");
    let solver = Solver::new(a.model.k, a.model.beta(), *sizes.iter().max().unwrap())?;
    solver.params(a.gamma)?;

    let mut rows = Vec::new();
    let mut updates = Vec::new();
    for &n in &sizes {
        let signals: Vec<Signal> = (0..a.reps as u64)
            .into_par_iter()
            .map(|rep| bench_signal(a, n, rep))
            .collect::<Result<_>>()?;
        let (mut secs, mut ups) = (0.0, 0.0);
        for f in &signals {
            let start = Instant::now();
            let res = solver.solve(f, a.gamma, a.pruning)?;
            secs += start.elapsed().as_secs_f64();
            ups += res.num_error_updates as f64;
        }
        let reps = a.reps as f64;
        rows.push(vec![n.to_string(), num(secs / reps), num(ups / reps)]);
        updates.push(ups / reps);
    }
    csv::write_table(a.output.as_deref(), "n,mean_seconds,mean_updates", &rows)?;
    println!("seed={}", a.seed);
    if sizes.len() > 1 {
        let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
        println!("slope={}", num(slope(&xs, &updates)));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Smooth(a) => smooth(a),
        Command::Gridsearch(a) => gridsearch(a),
        Command::Generate(a) => generate_cmd(a),
        Command::Stability(a) => stability(a),
        Command::Bench(a) => bench(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
