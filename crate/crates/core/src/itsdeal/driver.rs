//! The generic inexact descent loop and its three instances.

use ndarray::Array1;

use super::direction::{check_direction_pair, DirectionRule, PowerDirection};
use super::params::HomeParams;
use super::step::{higda_step_size, ArmijoBacktracking, FixedStep, HolderBacktracking, StepContext, StepRule};
use super::trace::{RunStatus, RunTrace, TraceRow};
use crate::clock::{Budget, Stopwatch};
use crate::envelope::SmoothnessBounds;
use crate::error::check_dim;
use crate::linalg::{norm, relative_error};
use crate::objective::{Counted, WeaklyConvexFn};
use crate::prox::ProxOracle;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions<T> {
    pub budget: Budget,
    /// Ground truth for the relative-error column.
    pub truth: Option<Array1<T>>,
    /// Fixed decrease constant for the per-row sufficient-decrease flag; when
    /// absent each row is checked against its step rule's own coefficient.
    pub rho_hat: Option<T>,
}

impl<T> RunOptions<T> {
    pub fn new(budget: Budget) -> Self {
        Self { budget, truth: None, rho_hat: None }
    }

    pub fn with_truth(mut self, truth: Array1<T>) -> Self {
        self.truth = Some(truth);
        self
    }
}

#[derive(Debug, Clone)]
pub struct RunResult<T> {
    pub trace: RunTrace,
    pub x_final: Array1<T>,
    pub status: RunStatus,
    pub oracle_calls: u64,
}

pub(crate) fn nan_row(iter: usize, wall_time_s: f64) -> TraceRow {
    TraceRow {
        iter,
        wall_time_s,
        value_eps: f64::NAN,
        grad_eps_norm: f64::NAN,
        eps_k: f64::NAN,
        step_alpha: f64::NAN,
        lbar: f64::NAN,
        inner_iters: 0,
        backtracks: 0,
        decrease_coef: f64::NAN,
        dir_inner: f64::NAN,
        dir_norm: f64::NAN,
        dir_ok: false,
        accept_ok: false,
        decrease_ok: false,
        cert_delta: f64::NAN,
        certified: false,
        relative_error: f64::NAN,
        objective: f64::NAN,
    }
}

pub(crate) fn params_header<T: Scalar>(trace: &mut RunTrace, hp: &HomeParams<T>) {
    let e = |v: T| format!("{:e}", v.as_f64());
    for (k, v) in [
        ("p", e(hp.p)),
        ("gamma", e(hp.gamma)),
        ("c1", e(hp.c1)),
        ("c2", e(hp.c2)),
        ("mu", e(hp.mu)),
        ("omega", e(hp.omega)),
        ("theta", e(hp.vartheta)),
        ("eps_scale", e(hp.eps.scale)),
        ("armijo_lambda", e(hp.armijo_lambda)),
        ("armijo_upsilon", e(hp.armijo_upsilon)),
        ("scenario", hp.scenario.to_string()),
        ("lbar_growth", e(hp.lbar_growth)),
        ("l0", e(hp.l0)),
        ("grad_tol", e(hp.grad_tol)),
        ("inner_kind", format!("{:?}", hp.inner.kind)),
        ("inner_alpha0", e(hp.inner.alpha0)),
        ("inner_max_iters", hp.inner.max_iters.to_string()),
        ("inner_move_tol", e(hp.inner.move_tol)),
    ] {
        trace.push_header(format!("run.{k}"), v);
    }
}

pub(crate) fn budget_header(trace: &mut RunTrace, budget: &Budget, status: &RunStatus, iters: usize, elapsed: f64) {
    trace.push_header("run.budget_max_iters", budget.max_iters);
    trace.push_header("run.budget_time_s", format!("{:e}", budget.time_s));
    trace.push_header("run.clock", format!("{:?}", budget.clock));
    trace.push_header("run.status", status.label());
    if let RunStatus::Aborted(msg) = status {
        trace.push_header("run.abort_reason", msg.replace('\n', " "));
    }
    let rate = if elapsed > 0.0 { iters as f64 / elapsed } else { f64::NAN };
    trace.push_header("run.iters_per_second", format!("{rate:e}"));
}

/// Generic inexact descent: at each iterate build the inexact oracle, pick a
/// direction, let the step rule choose `α_k`, and record the row. The oracle
/// at the accepted trial point becomes the oracle of the next iterate.
pub fn itsdeal_generic_run<T, F, O, D, S>(
    f: &F,
    oracle: &O,
    params: &HomeParams<T>,
    x0: &Array1<T>,
    direction: &D,
    step_rule: &mut S,
    opts: &RunOptions<T>,
) -> Result<RunResult<T>>
where
    T: Scalar,
    F: WeaklyConvexFn<T> + ?Sized,
    O: ProxOracle<T>,
    D: DirectionRule<T>,
    S: StepRule<T>,
{
    params.validate()?;
    opts.budget.validate()?;
    check_dim(f.dim(), x0.len())?;
    if let Some(t) = &opts.truth {
        check_dim(f.dim(), t.len())?;
    }
    if oracle.p() != params.p || oracle.gamma() != params.gamma {
        return Err(Error::InvalidParameter("oracle (p, gamma) differ from the run parameters".into()));
    }
    let counted = Counted::new(f);
    let clock = Stopwatch::start(opts.budget.clock);
    let mut trace = RunTrace::default();
    trace.push_header("run.step_rule", step_rule.name());
    params_header(&mut trace, params);

    let mut current = oracle.evaluate(&counted, x0, params.eps.eps(0))?;
    let mut previous: Option<(Array1<T>, Array1<T>)> = None;
    let exponent = T::one() + params.vartheta;
    let mut k = 0usize;
    let status = loop {
        let elapsed = clock.elapsed(counted.calls());
        let gn = current.grad_norm();
        let mut row = nan_row(k, elapsed);
        row.value_eps = current.value_eps.as_f64();
        row.grad_eps_norm = gn.as_f64();
        row.eps_k = current.cert.eps_k.as_f64();
        row.inner_iters = current.cert.inner_iters;
        row.cert_delta = current.cert.delta_k.as_f64();
        row.certified = current.cert.certified;
        row.objective = f.value(&current.x).as_f64();
        if let Some(t) = &opts.truth {
            row.relative_error = relative_error(&current.x, t).as_f64();
        }
        let stop = if gn <= params.grad_tol {
            Some(RunStatus::Converged)
        } else if k >= opts.budget.max_iters {
            Some(RunStatus::MaxIterations)
        } else if elapsed >= opts.budget.time_s {
            Some(RunStatus::TimeBudget)
        } else {
            None
        };
        if let Some(s) = stop {
            trace.rows.push(row);
            break s;
        }

        let d = direction.direction(&current.grad_eps);
        row.dir_inner = current.grad_eps.dot(&d).as_f64();
        row.dir_norm = norm(&d).as_f64();
        row.dir_ok = check_direction_pair(&current.grad_eps, &d, params.c1, params.c2, params.vartheta);
        let eps_next = params.eps.eps(k + 1);
        let ctx = StepContext {
            f: &counted,
            oracle,
            params,
            current: &current,
            direction: &d,
            k,
            eps_next,
            previous: previous.as_ref().map(|(x, g)| (x, g)),
        };
        let outcome = match step_rule.step(&ctx) {
            Ok(o) => o,
            Err(Error::Abort(msg)) => {
                trace.rows.push(row);
                break RunStatus::Aborted(msg);
            }
            Err(e) => return Err(e),
        };
        let coef = opts.rho_hat.unwrap_or(outcome.decrease_coef);
        row.step_alpha = outcome.alpha.as_f64();
        row.lbar = outcome.lbar.map_or(f64::NAN, |l| l.as_f64());
        row.backtracks = outcome.backtracks;
        row.decrease_coef = outcome.decrease_coef.as_f64();
        row.accept_ok = outcome.accept_ok;
        row.decrease_ok = outcome.next.value_eps <= current.value_eps - coef * gn.powf(exponent) + eps_next;
        trace.rows.push(row);
        let next = outcome.next;
        previous = Some((
            std::mem::replace(&mut current.x, Array1::zeros(0)),
            std::mem::replace(&mut current.grad_eps, Array1::zeros(0)),
        ));
        current = next;
        k += 1;
    };
    let elapsed = clock.elapsed(counted.calls());
    budget_header(&mut trace, &opts.budget, &status, k, elapsed);
    Ok(RunResult { trace, x_final: current.x, status, oracle_calls: counted.calls() })
}

fn holder_params<T: Scalar>(params: &HomeParams<T>) -> HomeParams<T> {
    params.with_omega(HomeParams::holder_omega(params.p))
}

/// Fixed-step Hölderian descent with the largest step allowed by `𝓛_p`.
/// The direction exponent is forced to `(3−p)/(p−1)`.
pub fn higda_run<T, F, O>(
    f: &F,
    oracle: &O,
    params: &HomeParams<T>,
    x0: &Array1<T>,
    bounds: &SmoothnessBounds<T>,
    opts: &RunOptions<T>,
) -> Result<RunResult<T>>
where
    T: Scalar,
    F: WeaklyConvexFn<T> + ?Sized,
    O: ProxOracle<T>,
{
    let hp = holder_params(params);
    let alpha = higda_step_size(&hp, bounds.cal_l_p)?;
    let mut rule = FixedStep { alpha, cal_l_p: bounds.cal_l_p };
    let mut res = itsdeal_generic_run(f, oracle, &hp, x0, &PowerDirection { omega: hp.omega }, &mut rule, opts)?;
    res.trace.push_header("run.alg", "higda");
    res.trace.push_header("run.cal_l_p", format!("{:e}", bounds.cal_l_p.as_f64()));
    Ok(res)
}

/// Parameter-free Hölderian descent with backtracking on `L̄`.
/// The direction exponent is forced to `(3−p)/(p−1)`.
pub fn pf_higda_run<T, F, O>(
    f: &F,
    oracle: &O,
    params: &HomeParams<T>,
    x0: &Array1<T>,
    opts: &RunOptions<T>,
) -> Result<RunResult<T>>
where
    T: Scalar,
    F: WeaklyConvexFn<T> + ?Sized,
    O: ProxOracle<T>,
{
    let hp = holder_params(params);
    let mut rule = HolderBacktracking::new(hp.scenario);
    let mut res = itsdeal_generic_run(f, oracle, &hp, x0, &PowerDirection { omega: hp.omega }, &mut rule, opts)?;
    res.trace.push_header("run.alg", "pf-higda");
    Ok(res)
}

/// Armijo backtracking descent along `d = −‖g‖^ω g` with `ϑ = ω + 1`.
pub fn ideals_run<T, F, O>(
    f: &F,
    oracle: &O,
    params: &HomeParams<T>,
    x0: &Array1<T>,
    opts: &RunOptions<T>,
) -> Result<RunResult<T>>
where
    T: Scalar,
    F: WeaklyConvexFn<T> + ?Sized,
    O: ProxOracle<T>,
{
    let hp = params.with_omega(params.omega);
    let mut res = itsdeal_generic_run(f, oracle, &hp, x0, &PowerDirection { omega: hp.omega }, &mut ArmijoBacktracking, opts)?;
    res.trace.push_header("run.alg", "ideals");
    Ok(res)
}
