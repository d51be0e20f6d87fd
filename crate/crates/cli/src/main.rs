use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use itsdeal::itsdeal::Scenario;
use itsdeal_cli::commands::{self, clock_from_rate, Failure};
use itsdeal_cli::config::{AlgName, AlgOverrides, BenchMode, Config, Problem};

/// Inexact two-level smoothing solvers and the sparse-recovery benchmark.
///
/// Exit codes: 0 success, 1 verification failure or I/O error,
/// 2 invalid configuration, 3 solver abort.
#[derive(Parser)]
#[command(name = "itsdeal", version = itsdeal::GIT_DESCRIBE)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one problem and write its trace.
    Solve(SolveArgs),
    /// Run an experiment and write traces plus summary.csv.
    Bench(BenchArgs),
    /// Run the numerical self-checks and print a JSON report.
    Verify(VerifyArgs),
    /// Generate a sparse-recovery instance file.
    GenInstance(GenArgs),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    alg: Option<AlgName>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    scenario: Option<Scenario>,
    /// Envelope-gradient Hölder constant for `higda`.
    #[arg(long)]
    cal_l: Option<f64>,
    /// Step size of the subgradient baselines.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    problem: Option<Problem>,
    /// Dimension of the synthetic problems.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    k1: Option<usize>,
    /// Load this instance file instead of generating one.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Starting point file (whitespace-separated values).
    #[arg(long)]
    x0: Option<PathBuf>,
    #[arg(long)]
    budget_s: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Measure time as oracle calls divided by this rate (deterministic).
    #[arg(long)]
    work_rate: Option<f64>,
    /// Trace file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    /// Worker threads; 0 uses every logical core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    budget_s: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    work_rate: Option<f64>,
    /// Run the p-sweep configured under `[bench.sweep]`.
    #[arg(long)]
    sweep: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Feed the gradient-bound group pairs with an understated δ.
    #[arg(long)]
    inject_violation: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(common: &Common) -> Result<Config, Failure> {
    let mut cfg = Config::load(common.config.as_deref()).map_err(Failure::Config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve(a) => {
            let mut cfg = load(&a.common)?;
            let overrides =
                AlgOverrides { alg: a.alg, p: a.p, omega: a.omega, scenario: a.scenario, cal_l: a.cal_l, alpha: a.alpha };
            let s = &mut cfg.solve;
            s.algorithm = overrides.apply(s.algorithm).map_err(Failure::Config)?;
            s.problem = a.problem.unwrap_or(s.problem);
            s.dim = a.dim.unwrap_or(s.dim);
            s.k1 = a.k1.unwrap_or(s.k1);
            s.budget_s = a.budget_s.unwrap_or(s.budget_s);
            s.max_iters = a.max_iters.or(s.max_iters);
            s.clock = clock_from_rate(a.work_rate).unwrap_or(s.clock);
            if a.instance.is_some() {
                s.instance_file = a.instance;
            }
            if a.x0.is_some() {
                s.x0_file = a.x0;
            }
            commands::solve(&cfg, a.out.as_deref())
        }
        Command::Bench(a) => {
            let mut cfg = load(&a.common)?;
            let b = &mut cfg.bench;
            b.budget_s = a.budget_s.unwrap_or(b.budget_s);
            b.trials = a.trials.unwrap_or(b.trials);
            b.max_iters = a.max_iters.or(b.max_iters);
            b.clock = clock_from_rate(a.work_rate).unwrap_or(b.clock);
            if a.sweep {
                b.mode = BenchMode::Sweep;
            }
            commands::bench(&cfg, a.jobs, &a.out)
        }
        Command::Verify(a) => commands::verify(a.inject_violation, a.out.as_deref()),
        Command::GenInstance(a) => {
            let mut cfg = load(&a.common)?;
            cfg.solve.k1 = a.k1.unwrap_or(cfg.solve.k1);
            commands::gen_instance(&cfg, a.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code() as u8)
        }
    }
}
