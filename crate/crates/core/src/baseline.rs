//! Normalized subgradient baselines run directly on `φ`.

use ndarray::Array1;

use crate::clock::Stopwatch;
use crate::error::check_dim;
use crate::itsdeal::{budget_header, nan_row, RunOptions, RunResult, RunStatus, RunTrace};
use crate::linalg::{norm, relative_error};
use crate::objective::{Counted, WeaklyConvexFn};
use crate::prox::{InnerSolverConfig, InnerStepKind};
use crate::{Result, Scalar};

/// `x^{k+1} = x^k − α_k ζ^k/‖ζ^k‖` with `ζ^k ∈ ∂φ(x^k)`, the same step schedule
/// as the inner proximal solver. Rows record the current (not best) iterate.
pub fn sg_baseline_run<T, F>(f: &F, kind: InnerStepKind, alpha0: T, x0: &Array1<T>, opts: &RunOptions<T>) -> Result<RunResult<T>>
where
    T: Scalar,
    F: WeaklyConvexFn<T> + ?Sized,
{
    let schedule = InnerSolverConfig { kind, alpha0, max_iters: 1, move_tol: T::zero() };
    schedule.validate()?;
    opts.budget.validate()?;
    check_dim(f.dim(), x0.len())?;
    let counted = Counted::new(f);
    let clock = Stopwatch::start(opts.budget.clock);
    let mut trace = RunTrace::default();
    trace.push_header("run.alg", match kind {
        InnerStepKind::DecayingStep => "sg-dss",
        InnerStepKind::ConstantStep => "sg-css",
    });
    trace.push_header("run.alpha0", format!("{:e}", alpha0.as_f64()));
    let mut x = x0.clone();
    let mut k = 0usize;
    let status = loop {
        let (value, zeta) = counted.value_and_subgradient(&x);
        let elapsed = clock.elapsed(counted.calls());
        let zn = norm(&zeta);
        let mut row = nan_row(k, elapsed);
        row.value_eps = value.as_f64();
        row.objective = value.as_f64();
        row.grad_eps_norm = zn.as_f64();
        if let Some(t) = &opts.truth {
            row.relative_error = relative_error(&x, t).as_f64();
        }
        let stop = if zn == T::zero() {
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
        let alpha = schedule.step(k);
        row.step_alpha = alpha.as_f64();
        row.dir_norm = alpha.as_f64();
        row.dir_inner = -zn.as_f64();
        trace.rows.push(row);
        x.scaled_add(-alpha / zn, &zeta);
        k += 1;
    };
    let elapsed = clock.elapsed(counted.calls());
    budget_header(&mut trace, &opts.budget, &status, k, elapsed);
    Ok(RunResult { trace, x_final: x, status, oracle_calls: counted.calls() })
}
