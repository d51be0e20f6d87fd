use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use ndarray::Array1;
use rayon::prelude::*;

use super::seed::trial_seed;
use super::spec::{AlgorithmSpec, ExperimentSpec, HomeSettings, MISSING_CAL_L};
use super::table::{write_header_lines, SuccessCell, SuccessTable};
use crate::baseline::sg_baseline_run;
use crate::clock::Budget;
use crate::envelope::{smoothness_constants, tau_lower_bounded, SmoothnessBounds};
use crate::itsdeal::{higda_run, ideals_run, pf_higda_run, HomeParams, RunOptions, RunResult, RunStatus, Scenario};
use crate::objective::{generate_instance, SparseRecoveryInstance, WeaklyConvexFn};
use crate::prox::{InnerStepKind, SubgradientProx};
use crate::{Error, Result};

/// Execution settings that do not affect results (except through `jobs` when
/// the wall clock is used).
#[derive(Debug, Clone, Default)]
pub struct BenchContext {
    /// Worker threads; `0` selects the number of logical cores.
    pub jobs: usize,
    /// Root output directory; traces go to `<out>/<name>/<alg>/k1_<k1>/trial<t>.csv`.
    pub out: Option<PathBuf>,
    /// Extra header lines prepended to every trace.
    pub header: Vec<(String, String)>,
}

/// Result of one `(algorithm, k1, trial)` run. Traces are written to disk
/// rather than kept.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub algorithm: String,
    pub k1: usize,
    pub trial: usize,
    pub seed: u64,
    pub final_relative_error: f64,
    pub iterations: usize,
    pub status: String,
    /// Abort reason or error message.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutcome {
    pub trials: Vec<TrialOutcome>,
    pub table: SuccessTable,
}

impl BenchOutcome {
    pub fn failures(&self) -> impl Iterator<Item = &TrialOutcome> {
        self.trials.iter().filter(|t| t.failure.is_some())
    }
}

/// Runs one algorithm from `x⁰ = 0` on a sparse-recovery instance.
pub fn run_algorithm(
    alg: &AlgorithmSpec,
    home: &HomeSettings,
    inst: &SparseRecoveryInstance<f64>,
    opts: &RunOptions<f64>,
) -> Result<RunResult<f64>> {
    run_algorithm_from(alg, home, inst, &Array1::zeros(inst.params.n), opts)
}

/// `𝓛_p` for a HiGDA entry: the configured value, or the estimate on
/// `B(0; radius)` from the weak-convexity modulus and lower bound of `f`.
pub fn higda_cal_l<F: WeaklyConvexFn<f64> + ?Sized>(alg: &AlgorithmSpec, hp: &HomeParams<f64>, f: &F) -> Result<f64> {
    let AlgorithmSpec::Higda { p, cal_l, radius, gamma_max } = *alg else {
        return Err(Error::InvalidParameter(format!("{} is not a higda entry", alg.label())));
    };
    match (cal_l, radius, gamma_max) {
        (Some(l), _, _) => Ok(l),
        (None, Some(r), Some(gmax)) => {
            let ell0 = f
                .lower_bound()
                .ok_or_else(|| Error::Hypothesis("the safeguarded cal_l estimate needs a lower bound".into()))?;
            let phi0 = f.value(&Array1::zeros(f.dim()));
            let tau = tau_lower_bounded(p, hp.gamma, gmax, r, phi0, ell0)?;
            Ok(smoothness_constants(p, hp.gamma, gmax, f.rho(), r, tau)?.cal_l_p)
        }
        _ => Err(Error::InvalidParameter(MISSING_CAL_L.into())),
    }
}

/// Runs one algorithm from `x0` on any weakly convex objective, with the
/// subgradient inner solver.
pub fn run_algorithm_from<F: WeaklyConvexFn<f64> + Sync + ?Sized>(
    alg: &AlgorithmSpec,
    home: &HomeSettings,
    f: &F,
    x0: &Array1<f64>,
    opts: &RunOptions<f64>,
) -> Result<RunResult<f64>> {
    let oracle = |hp: &HomeParams<f64>| SubgradientProx { p: hp.p, gamma: hp.gamma, mu: hp.mu, inner: hp.inner };
    match *alg {
        AlgorithmSpec::SgDss { alpha0 } => sg_baseline_run(f, InnerStepKind::DecayingStep, alpha0, x0, opts),
        AlgorithmSpec::SgCss { alpha } => sg_baseline_run(f, InnerStepKind::ConstantStep, alpha, x0, opts),
        AlgorithmSpec::PfHigda { p, scenario } => {
            let hp = home.resolve(p, HomeParams::holder_omega(p), scenario)?;
            pf_higda_run(f, &oracle(&hp), &hp, x0, opts)
        }
        AlgorithmSpec::Ideals { p, omega } => {
            let hp = home.resolve(p, omega.unwrap_or_else(|| HomeParams::armijo_omega(p)), Scenario::default())?;
            ideals_run(f, &oracle(&hp), &hp, x0, opts)
        }
        AlgorithmSpec::Higda { p, .. } => {
            let hp = home.resolve(p, HomeParams::holder_omega(p), Scenario::default())?;
            let cal_l = higda_cal_l(alg, &hp, f)?;
            higda_run(f, &oracle(&hp), &hp, x0, &SmoothnessBounds::from_cal_l_p(cal_l), opts)
        }
    }
}

pub fn trial_path(root: &Path, spec: &ExperimentSpec, alg: &str, k1: usize, trial: usize) -> PathBuf {
    root.join(&spec.name).join(alg).join(format!("k1_{k1}")).join(format!("trial{trial}.csv"))
}

fn budget(spec: &ExperimentSpec) -> Budget {
    Budget { max_iters: spec.max_iters.unwrap_or(usize::MAX), time_s: spec.time_budget_s, clock: spec.clock }
}

fn run_one(spec: &ExperimentSpec, ctx: &BenchContext, alg: &AlgorithmSpec, k1: usize, trial: usize) -> Result<TrialOutcome> {
    let label = alg.label();
    let seed = trial_seed(spec.master_seed, k1, trial);
    let params = spec.instance.params(k1, seed);
    let inst = generate_instance::<f64>(params)?;
    let opts = RunOptions::new(budget(spec)).with_truth(inst.x_true.clone());
    let res = run_algorithm(alg, &spec.home, &inst, &opts);
    let (outcome, trace) = match res {
        Ok(r) => {
            let failure = match &r.status {
                RunStatus::Aborted(msg) => Some(msg.clone()),
                _ => None,
            };
            let out = TrialOutcome {
                algorithm: label.clone(),
                k1,
                trial,
                seed,
                final_relative_error: r.trace.final_relative_error().unwrap_or(f64::NAN),
                iterations: r.trace.rows.len().saturating_sub(1),
                status: r.status.label().to_string(),
                failure,
            };
            (out, Some(r.trace))
        }
        Err(e) => (
            TrialOutcome {
                algorithm: label.clone(),
                k1,
                trial,
                seed,
                final_relative_error: f64::NAN,
                iterations: 0,
                status: "error".into(),
                failure: Some(e.to_string()),
            },
            None,
        ),
    };
    if let (Some(root), Some(mut trace)) = (&ctx.out, trace) {
        let mut header = ctx.header.clone();
        header.extend([
            ("bench.experiment".to_string(), spec.name.clone()),
            ("bench.algorithm".to_string(), label.clone()),
            ("bench.k1".to_string(), k1.to_string()),
            ("bench.trial".to_string(), trial.to_string()),
            ("bench.seed".to_string(), seed.to_string()),
            ("bench.master_seed".to_string(), spec.master_seed.to_string()),
            ("bench.n".to_string(), spec.instance.n.to_string()),
            ("bench.m".to_string(), spec.instance.m.to_string()),
            ("bench.k2".to_string(), spec.instance.k2.to_string()),
            ("bench.sigma".to_string(), format!("{:e}", spec.instance.sigma)),
            ("bench.lambda_bar".to_string(), format!("{:e}", spec.instance.lambda_bar)),
            ("bench.signal".to_string(), format!("{:?}", spec.instance.signal)),
            ("build.git_describe".to_string(), crate::GIT_DESCRIBE.to_string()),
        ]);
        header.append(&mut trace.header);
        trace.header = header;
        let path = trial_path(root, spec, &label, k1, trial);
        fs::create_dir_all(path.parent().expect("trial path has a parent"))?;
        trace.write_csv(BufWriter::new(fs::File::create(&path)?))?;
    }
    Ok(outcome)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))
}

/// Aggregates outcomes into success probabilities. Order: roster, then `k1`, then threshold.
pub fn tabulate(spec: &ExperimentSpec, trials: &[TrialOutcome]) -> SuccessTable {
    let mut cells = Vec::new();
    for alg in &spec.algorithms {
        let label = alg.label();
        for &k1 in &spec.instance.k1 {
            let cell: Vec<&TrialOutcome> = trials.iter().filter(|t| t.algorithm == label && t.k1 == k1).collect();
            for &threshold in &spec.thresholds {
                cells.push(SuccessCell {
                    algorithm: label.clone(),
                    k1,
                    threshold,
                    successes: cell.iter().filter(|t| t.final_relative_error < threshold).count(),
                    trials: cell.len(),
                });
            }
        }
    }
    SuccessTable { cells }
}

fn output_header(spec: &ExperimentSpec, ctx: &BenchContext) -> Vec<(String, String)> {
    let mut header = ctx.header.clone();
    header.push(("bench.experiment".into(), spec.name.clone()));
    header.push(("bench.master_seed".into(), spec.master_seed.to_string()));
    header.push(("build.git_describe".into(), crate::GIT_DESCRIBE.to_string()));
    header
}

fn write_outputs(spec: &ExperimentSpec, ctx: &BenchContext, outcome: &BenchOutcome) -> Result<()> {
    let Some(root) = &ctx.out else { return Ok(()) };
    let dir = root.join(&spec.name);
    fs::create_dir_all(&dir)?;
    let header = output_header(spec, ctx);
    outcome.table.write_csv_with_header(&header, BufWriter::new(fs::File::create(dir.join("summary.csv"))?))?;
    let failures: Vec<&TrialOutcome> = outcome.failures().collect();
    let manifest = dir.join("failures.csv");
    if failures.is_empty() {
        if manifest.exists() {
            fs::remove_file(manifest)?;
        }
    } else {
        let mut file = BufWriter::new(fs::File::create(manifest)?);
        write_header_lines(&mut file, &header)?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["algorithm", "k1", "trial", "seed", "status", "reason"])?;
        for f in failures {
            w.write_record([
                f.algorithm.clone(),
                f.k1.to_string(),
                f.trial.to_string(),
                f.seed.to_string(),
                f.status.clone(),
                f.failure.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
    }
    Ok(())
}

/// Runs every algorithm of the roster on the same instances (one per
/// `(k1, trial)` cell), writes traces and `summary.csv`, and lists failed
/// trials in `failures.csv`. Individual trial failures are not fatal.
pub fn run_comparison(spec: &ExperimentSpec, ctx: &BenchContext) -> Result<BenchOutcome> {
    spec.validate()?;
    let tasks: Vec<(&AlgorithmSpec, usize, usize)> = spec
        .algorithms
        .iter()
        .flat_map(|a| spec.instance.k1.iter().flat_map(move |&k1| (0..spec.trials).map(move |t| (a, k1, t))))
        .collect();
    let trials: Vec<TrialOutcome> = pool(ctx.jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|&(a, k1, t)| run_one(spec, ctx, a, k1, t))
            .collect::<Result<Vec<_>>>()
    })?;
    let outcome = BenchOutcome { table: tabulate(spec, &trials), trials };
    write_outputs(spec, ctx, &outcome)?;
    Ok(outcome)
}

pub fn success_probability(spec: &ExperimentSpec, ctx: &BenchContext) -> Result<SuccessTable> {
    Ok(run_comparison(spec, ctx)?.table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepFamily {
    /// Scenarios S1–S3 for each `p`.
    PfHigda,
    /// `ω ∈ {0, …, 5}` for each `p`.
    Ideals,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub p: f64,
    pub candidate: AlgorithmSpec,
    pub mean_final_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    /// Per `p`, the candidate with the smallest mean final relative error.
    pub best: Vec<(f64, AlgorithmSpec)>,
    pub outcome: BenchOutcome,
}

impl SweepReport {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        self.write_csv_with_header(&[], w)
    }

    pub fn write_csv_with_header<W: std::io::Write>(&self, header: &[(String, String)], mut w: W) -> Result<()> {
        write_header_lines(&mut w, header)?;
        writeln!(w, "p,algorithm,mean_final_error,best")?;
        for e in &self.entries {
            let best = self.best.iter().any(|(p, a)| *p == e.p && *a == e.candidate);
            writeln!(w, "{},{},{:.16e},{}", e.p, e.candidate.label(), e.mean_final_error, u8::from(best))?;
        }
        Ok(())
    }
}

pub fn sweep_candidates(family: SweepFamily, p: f64) -> Vec<AlgorithmSpec> {
    match family {
        SweepFamily::PfHigda => [Scenario::S1, Scenario::S2, Scenario::S3]
            .into_iter()
            .map(|scenario| AlgorithmSpec::PfHigda { p, scenario })
            .collect(),
        SweepFamily::Ideals => (0..=5).map(|w| AlgorithmSpec::Ideals { p, omega: Some(w as f64) }).collect(),
    }
}

/// Runs every candidate configuration for each `p` (replacing the spec's
/// roster), then records the best candidate per `p` by mean final relative
/// error. Writes `sweep.csv` next to `summary.csv`.
pub fn sweep_p(spec: &ExperimentSpec, family: SweepFamily, p_list: &[f64], ctx: &BenchContext) -> Result<SweepReport> {
    if p_list.is_empty() || p_list.iter().any(|&p| !(p > 1.0 && p <= 2.0)) {
        return Err(Error::Domain("p values must lie in (1, 2]".into()));
    }
    let mut sweep = spec.clone();
    sweep.algorithms = p_list.iter().flat_map(|&p| sweep_candidates(family, p)).collect();
    let outcome = run_comparison(&sweep, ctx)?;
    let mut entries = Vec::new();
    let mut best = Vec::new();
    for &p in p_list {
        let mut winner: Option<(f64, AlgorithmSpec)> = None;
        for cand in sweep_candidates(family, p) {
            let label = cand.label();
            let errs: Vec<f64> = outcome
                .trials
                .iter()
                .filter(|t| t.algorithm == label)
                .map(|t| if t.final_relative_error.is_nan() { f64::INFINITY } else { t.final_relative_error })
                .collect();
            let mean = errs.iter().sum::<f64>() / errs.len() as f64;
            entries.push(SweepEntry { p, candidate: cand, mean_final_error: mean });
            if winner.as_ref().is_none_or(|(m, _)| mean < *m) {
                winner = Some((mean, cand));
            }
        }
        if let Some((_, cand)) = winner {
            best.push((p, cand));
        }
    }
    let report = SweepReport { entries, best, outcome };
    if let Some(root) = &ctx.out {
        let file = BufWriter::new(fs::File::create(root.join(&spec.name).join("sweep.csv"))?);
        report.write_csv_with_header(&output_header(spec, ctx), file)?;
    }
    Ok(report)
}
