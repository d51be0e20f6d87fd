use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use itsdeal::bench::{run_algorithm_from, run_comparison, sweep_p, BenchContext, BenchOutcome};
use itsdeal::clock::{Budget, ClockMode};
use itsdeal::itsdeal::{RunOptions, RunStatus};
use itsdeal::objective::{
    generate_instance, read_instance, write_instance_with_header, AbsSum, DoubleWell, HalfSquaredNorm,
    SparseRecoveryInstance,
};
use itsdeal::verify::run_suite;
use ndarray::Array1;
use serde::Serialize;

use crate::config::{BenchMode, Config, Problem};

/// Process exit status. The numeric codes are part of the interface.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1: a verification group failed, or an I/O error occurred.
    Runtime(String),
    /// Exit 2: the configuration or flags are invalid.
    Config(String),
    /// Exit 3: a solver aborted.
    Abort(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Config(_) => 2,
            Failure::Abort(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Runtime(m) | Failure::Config(m) | Failure::Abort(m) => m,
        }
    }
}

impl From<itsdeal::Error> for Failure {
    fn from(e: itsdeal::Error) -> Self {
        use itsdeal::Error as E;
        match e {
            E::Abort(_) => Failure::Abort(e.to_string()),
            E::Io(_) | E::Csv(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

pub type CmdResult = Result<(), Failure>;

fn output(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(fs::File::create(p)?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn build_header(cfg: &Config) -> Vec<(String, String)> {
    let mut h = cfg.header();
    h.push(("build.git_describe".into(), itsdeal::GIT_DESCRIBE.into()));
    h
}

fn read_vector(path: &Path, dim: usize) -> Result<Array1<f64>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let values = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| Failure::Config(format!("{}: bad number {t:?}: {e}", path.display()))))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != dim {
        return Err(Failure::Config(format!(
            "{}: starting point has {} entries, problem dimension is {dim}",
            path.display(),
            values.len()
        )));
    }
    Ok(Array1::from(values))
}

fn load_instance(cfg: &Config) -> Result<SparseRecoveryInstance<f64>, Failure> {
    match &cfg.solve.instance_file {
        Some(p) => {
            let f = fs::File::open(p).map_err(|e| Failure::Config(format!("cannot open {}: {e}", p.display())))?;
            read_instance(BufReader::new(f)).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))
        }
        None => Ok(generate_instance(cfg.instance.params(cfg.solve.k1, cfg.seed))?),
    }
}

pub fn solve(cfg: &Config, out: Option<&Path>) -> CmdResult {
    let s = &cfg.solve;
    s.algorithm.validate(&cfg.home)?;
    if !(s.budget_s > 0.0) {
        return Err(Failure::Config(format!("solve.budget_s must be positive, got {}", s.budget_s)));
    }
    let budget = Budget { max_iters: s.max_iters.unwrap_or(usize::MAX), time_s: s.budget_s, clock: s.clock };
    let start = |dim: usize| match &s.x0_file {
        Some(p) => read_vector(p, dim),
        None => Ok(Array1::from_elem(dim, s.x0_fill)),
    };
    let alg = &s.algorithm;
    let home = &cfg.home;
    let plain = RunOptions::new(budget);
    let result = match s.problem {
        Problem::Rsr => {
            let inst = load_instance(cfg)?;
            let opts = RunOptions::new(budget).with_truth(inst.x_true.clone());
            run_algorithm_from(alg, home, &inst, &start(inst.params.n)?, &opts)
        }
        Problem::Quadratic => run_algorithm_from(alg, home, &HalfSquaredNorm { dim: s.dim }, &start(s.dim)?, &plain),
        Problem::DoubleWell => run_algorithm_from(alg, home, &DoubleWell { dim: s.dim }, &start(s.dim)?, &plain),
        Problem::AbsSum => run_algorithm_from(alg, home, &AbsSum { dim: s.dim }, &start(s.dim)?, &plain),
    }?;
    let mut trace = result.trace;
    let mut header = build_header(cfg);
    header.append(&mut trace.header);
    trace.header = header;
    let mut w = output(out)?;
    trace.write_csv(&mut w)?;
    w.flush()?;
    match result.status {
        RunStatus::Aborted(reason) => Err(Failure::Abort(format!("solver aborted: {reason}"))),
        _ => Ok(()),
    }
}

pub fn bench(cfg: &Config, jobs: usize, out: &Path) -> CmdResult {
    let spec = cfg.experiment();
    spec.validate()?;
    let ctx = BenchContext { jobs, out: Some(out.to_path_buf()), header: build_header(cfg) };
    let outcome: BenchOutcome = match cfg.bench.mode {
        BenchMode::Compare => run_comparison(&spec, &ctx)?,
        BenchMode::Sweep => {
            let report = sweep_p(&spec, cfg.bench.sweep.family, &cfg.bench.sweep.p, &ctx)?;
            for (p, best) in &report.best {
                eprintln!("p = {p}: best {}", best.label());
            }
            report.outcome
        }
    };
    let stdout = io::stdout();
    let mut w = stdout.lock();
    outcome.table.write_csv(&mut w)?;
    let failed = outcome.failures().count();
    if failed > 0 {
        let manifest: PathBuf = out.join(&spec.name).join("failures.csv");
        return Err(Failure::Abort(format!("{failed} trial(s) failed; see {}", manifest.display())));
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    passed: bool,
    git_describe: &'a str,
    groups: &'a [itsdeal::verify::GroupResult],
}

pub fn verify(inject_violation: bool, out: Option<&Path>) -> CmdResult {
    let report = run_suite(inject_violation);
    let json = VerifyJson { passed: report.passed(), git_describe: itsdeal::GIT_DESCRIBE, groups: &report.groups };
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, &json).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.groups.iter().filter(|g| !g.passed).map(|g| g.group.as_str()).collect();
        Err(Failure::Runtime(format!("verification failed: {}", failed.join(", "))))
    }
}

pub fn gen_instance(cfg: &Config, out: Option<&Path>) -> CmdResult {
    let inst: SparseRecoveryInstance<f64> = generate_instance(cfg.instance.params(cfg.solve.k1, cfg.seed))?;
    let mut w = output(out)?;
    write_instance_with_header(&mut w, &inst, &build_header(cfg))?;
    w.flush()?;
    Ok(())
}

/// Clock selected by `--work-rate`.
pub fn clock_from_rate(rate: Option<f64>) -> Option<ClockMode> {
    rate.map(|evals_per_second| ClockMode::Work { evals_per_second })
}
