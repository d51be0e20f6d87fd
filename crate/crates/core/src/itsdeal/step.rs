//! Step-size rules plugged into the generic descent driver.

use ndarray::Array1;

use super::params::{HomeParams, Scenario};
use crate::linalg::{dist, norm};
use crate::objective::WeaklyConvexFn;
use crate::prox::{InexactOracle, ProxOracle};
use crate::{Error, Result, Scalar};

/// Largest admissible fixed step of HiGDA:
/// `min{γ^{2/(p−1)}/c₂, ((p+1)m/(2c₂^{(p+1)/2}𝓛_p))^{2/(p−1)}}` with `m = c₁ − 2^{2−p}μ^{p−1}c₂`.
pub fn higda_step_size<T: Scalar>(params: &HomeParams<T>, cal_l_p: T) -> Result<T> {
    let m = params.descent_margin();
    if !(m > T::zero()) {
        return Err(Error::Hypothesis(format!("c1 - 2^(2-p) mu^(p-1) c2 = {m} is not positive")));
    }
    if !(cal_l_p > T::zero()) {
        return Err(Error::InvalidParameter(format!("Hölder constant must be positive, got {cal_l_p}")));
    }
    let p = params.p;
    let two = T::lit(2.0);
    let second = ((p + T::one()) * m / (two * params.c2.powf((p + T::one()) / two) * cal_l_p)).powf(two / (p - T::one()));
    Ok(params.step_cap().min(second))
}

/// Step of parameter-free HiGDA for a trial constant `L̄` (infinite `L̄` term when `L̄ = 0`).
pub fn pf_higda_step_size<T: Scalar>(params: &HomeParams<T>, lbar: T) -> T {
    let p = params.p;
    let two = T::lit(2.0);
    let cap = params.step_cap();
    if lbar <= T::zero() {
        return cap;
    }
    let second = (params.descent_margin() / (params.c2.powf((p + T::one()) / two) * lbar)).powf(two / (p - T::one()));
    cap.min(second)
}

/// Guaranteed-decrease coefficient `α(m − (2L/(p+1))α^{(p−1)/2}c₂^{(p+1)/2})`.
pub fn holder_decrease_coef<T: Scalar>(params: &HomeParams<T>, alpha: T, l: T) -> T {
    let p = params.p;
    let two = T::lit(2.0);
    alpha
        * (params.descent_margin()
            - two * l / (p + T::one()) * alpha.powf((p - T::one()) / two) * params.c2.powf((p + T::one()) / two))
}

/// Read-only view of the current iterate handed to a step rule.
pub struct StepContext<'a, T: Scalar, F: ?Sized, O> {
    pub f: &'a F,
    pub oracle: &'a O,
    pub params: &'a HomeParams<T>,
    pub current: &'a InexactOracle<T>,
    pub direction: &'a Array1<T>,
    pub k: usize,
    pub eps_next: T,
    /// Previous iterate and its inexact gradient.
    pub previous: Option<(&'a Array1<T>, &'a Array1<T>)>,
}

impl<T: Scalar, F: WeaklyConvexFn<T> + ?Sized, O: ProxOracle<T>> StepContext<'_, T, F, O> {
    pub fn trial(&self, alpha: T) -> Result<InexactOracle<T>> {
        let mut x = self.current.x.clone();
        x.scaled_add(alpha, self.direction);
        self.oracle.evaluate(self.f, &x, self.eps_next)
    }

    pub fn grad_norm(&self) -> T {
        self.current.grad_norm()
    }
}

/// An accepted step together with the oracle at the new point.
#[derive(Debug, Clone)]
pub struct StepOutcome<T> {
    pub alpha: T,
    pub next: InexactOracle<T>,
    pub lbar: Option<T>,
    pub backtracks: usize,
    /// Coefficient `c` of the rule's own test `F(x⁺) ≤ F(x) − c‖g‖^{1+ϑ} + ε_{k+1}`.
    pub decrease_coef: T,
    /// Whether the rule's acceptance test holds at the returned point.
    pub accept_ok: bool,
}

pub trait StepRule<T: Scalar> {
    fn name(&self) -> &'static str;

    fn step<F: WeaklyConvexFn<T> + ?Sized, O: ProxOracle<T>>(
        &mut self,
        ctx: &StepContext<'_, T, F, O>,
    ) -> Result<StepOutcome<T>>;
}

fn accepts<T: Scalar>(current: T, trial: T, coef: T, gpow: T, eps_next: T) -> bool {
    trial <= current - coef * gpow + eps_next
}

/// Fixed step `α` with the decrease coefficient implied by a known Hölder constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedStep<T> {
    pub alpha: T,
    pub cal_l_p: T,
}

impl<T: Scalar> StepRule<T> for FixedStep<T> {
    fn name(&self) -> &'static str {
        "fixed"
    }

    fn step<F: WeaklyConvexFn<T> + ?Sized, O: ProxOracle<T>>(
        &mut self,
        ctx: &StepContext<'_, T, F, O>,
    ) -> Result<StepOutcome<T>> {
        let next = ctx.trial(self.alpha)?;
        let coef = holder_decrease_coef(ctx.params, self.alpha, self.cal_l_p);
        let gpow = ctx.grad_norm().powf(T::one() + ctx.params.vartheta);
        let accept_ok = accepts(ctx.current.value_eps, next.value_eps, coef, gpow, ctx.eps_next);
        Ok(StepOutcome { alpha: self.alpha, next, lbar: Some(self.cal_l_p), backtracks: 0, decrease_coef: coef, accept_ok })
    }
}

/// Backtracking on the Hölder constant estimate `L̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderBacktracking<T> {
    pub scenario: Scenario,
    /// `L̄` accepted at the previous outer iteration.
    pub last_accepted: Option<T>,
}

impl<T: Scalar> HolderBacktracking<T> {
    pub fn new(scenario: Scenario) -> Self {
        Self { scenario, last_accepted: None }
    }

    /// Trial constant for the `i`-th inner attempt. A zero or missing estimate
    /// is tried once and then replaced by `L₀`.
    fn trial_lbar<F: ?Sized, O>(&self, ctx: &StepContext<'_, T, F, O>, i: usize) -> T {
        let hp = ctx.params;
        let grow = |base: T, e: usize| base * hp.lbar_growth.powi(e as i32);
        let base = match self.scenario {
            Scenario::S1 => None,
            Scenario::S2 => self.last_accepted,
            Scenario::S3 => ctx.previous.map(|(x_prev, g_prev)| {
                let dx = dist(&ctx.current.x, x_prev);
                let dg = dist(&ctx.current.grad_eps, g_prev);
                if dx == T::zero() {
                    T::zero()
                } else {
                    dg / dx.powf((hp.p - T::one()) / T::lit(2.0))
                }
            }),
        };
        match base {
            Some(b) if b > T::zero() && b.is_finite() => grow(b, i),
            Some(_) if i == 0 => T::zero(),
            Some(_) => grow(hp.l0, i - 1),
            None => grow(hp.l0, i),
        }
    }
}

impl<T: Scalar> StepRule<T> for HolderBacktracking<T> {
    fn name(&self) -> &'static str {
        "holder-backtracking"
    }

    fn step<F: WeaklyConvexFn<T> + ?Sized, O: ProxOracle<T>>(
        &mut self,
        ctx: &StepContext<'_, T, F, O>,
    ) -> Result<StepOutcome<T>> {
        let hp = ctx.params;
        let gpow = ctx.grad_norm().powf((hp.p + T::one()) / (hp.p - T::one()));
        for i in 0..hp.max_lbar_trials {
            let lbar = self.trial_lbar(ctx, i);
            let alpha = pf_higda_step_size(hp, lbar);
            let next = ctx.trial(alpha)?;
            let coef = holder_decrease_coef(hp, alpha, lbar);
            if accepts(ctx.current.value_eps, next.value_eps, coef, gpow, ctx.eps_next) {
                self.last_accepted = Some(lbar);
                return Ok(StepOutcome { alpha, next, lbar: Some(lbar), backtracks: i, decrease_coef: coef, accept_ok: true });
            }
        }
        Err(Error::Abort(format!(
            "no L̄ accepted after {} trials at iteration {} (‖g‖ = {:e})",
            hp.max_lbar_trials,
            ctx.k,
            ctx.grad_norm()
        )))
    }
}

/// Armijo backtracking from `α̂ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ArmijoBacktracking;

impl<T: Scalar> StepRule<T> for ArmijoBacktracking {
    fn name(&self) -> &'static str {
        "armijo"
    }

    fn step<F: WeaklyConvexFn<T> + ?Sized, O: ProxOracle<T>>(
        &mut self,
        ctx: &StepContext<'_, T, F, O>,
    ) -> Result<StepOutcome<T>> {
        let hp = ctx.params;
        let gpow = ctx.grad_norm().powf(T::one() + hp.vartheta);
        let slope = hp.armijo_lambda * hp.descent_margin();
        let mut alpha = T::one();
        for backtracks in 0..=hp.max_backtracks {
            let next = ctx.trial(alpha)?;
            let coef = alpha * slope;
            if accepts(ctx.current.value_eps, next.value_eps, coef, gpow, ctx.eps_next) {
                return Ok(StepOutcome { alpha, next, lbar: None, backtracks, decrease_coef: coef, accept_ok: true });
            }
            alpha = alpha * hp.armijo_upsilon;
        }
        Err(Error::Abort(format!(
            "Armijo test failed after {} backtracks at iteration {} (‖g‖ = {:e})",
            hp.max_backtracks,
            ctx.k,
            norm(&ctx.current.grad_eps)
        )))
    }
}
