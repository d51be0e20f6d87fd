use super::params::HomeParams;
use super::trace::RunTrace;
use crate::Scalar;

/// Realized rate check for a trace: running minimum of the gradient norms
/// against `((F_ε(x⁰) − F* + ε̄)/((N+1)ϱ̂))^{1/(1+ϑ)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// `ϱ̂`: the smallest decrease coefficient over accepted steps.
    pub rho_hat: f64,
    pub eps_bar: f64,
    pub initial_value: f64,
    pub f_star: f64,
    pub min_grad: Vec<f64>,
    pub bound: Vec<f64>,
    /// `min_grad[N] / bound[N]`.
    pub ratio: Vec<f64>,
    /// Factor turning the inexact-gradient bound into one for the exact gradient.
    pub exact_gradient_factor: f64,
}

impl RateReport {
    pub fn holds(&self) -> bool {
        self.ratio.iter().all(|&r| r <= 1.0)
    }

    pub fn exact_gradient_bound(&self) -> Vec<f64> {
        self.bound.iter().map(|b| b * self.exact_gradient_factor).collect()
    }
}

pub fn residual_rate_report<T: Scalar>(trace: &RunTrace, params: &HomeParams<T>, f_star_bound: f64) -> RateReport {
    let rows = &trace.rows;
    let rho_hat = rows
        .iter()
        .filter(|r| r.has_step() && r.accept_ok)
        .map(|r| r.decrease_coef)
        .fold(f64::INFINITY, f64::min);
    let rho_hat = if rho_hat.is_finite() { rho_hat } else { f64::NAN };
    let eps_bar = params.eps.total().as_f64();
    let initial_value = rows.first().map_or(f64::NAN, |r| r.value_eps);
    let expo = 1.0 / (1.0 + params.vartheta.as_f64());
    let mut running = f64::INFINITY;
    let mut min_grad = Vec::with_capacity(rows.len());
    let mut bound = Vec::with_capacity(rows.len());
    let mut ratio = Vec::with_capacity(rows.len());
    for (n, r) in rows.iter().enumerate() {
        running = running.min(r.grad_eps_norm);
        let b = ((initial_value - f_star_bound + eps_bar) / ((n as f64 + 1.0) * rho_hat)).powf(expo);
        min_grad.push(running);
        bound.push(b);
        ratio.push(if b > 0.0 { running / b } else { f64::INFINITY });
    }
    RateReport {
        rho_hat,
        eps_bar,
        initial_value,
        f_star: f_star_bound,
        min_grad,
        bound,
        ratio,
        exact_gradient_factor: 1.0 + params.inexactness_factor().as_f64(),
    }
}
