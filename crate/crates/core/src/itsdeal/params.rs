use serde::{Deserialize, Serialize};

use crate::prox::{default_mu, InnerSolverConfig};
use crate::{Error, Result, Scalar};

/// Rule for the base of the Hölder-constant estimate in parameter-free HiGDA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Scenario {
    /// `L̄ = ῡ^i L₀`.
    S1,
    /// `L̄ = ῡ^i L_k`, with `L_k` the value accepted at the previous iteration.
    S2,
    /// `L̄ = ῡ^i L̂_k`, `L̂_k = ‖g_k − g_{k−1}‖ / ‖x_k − x_{k−1}‖^{(p−1)/2}`.
    #[default]
    S3,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scenario::S1 => "S1",
            Scenario::S2 => "S2",
            Scenario::S3 => "S3",
        })
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S1" => Ok(Scenario::S1),
            "S2" => Ok(Scenario::S2),
            "S3" => Ok(Scenario::S3),
            other => Err(Error::Parse(format!("unknown scenario {other:?}"))),
        }
    }
}

/// Objective-gap budgets `ε_k = scale / (k+1)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsSchedule<T> {
    pub scale: T,
}

impl<T: Scalar> Default for EpsSchedule<T> {
    fn default() -> Self {
        Self { scale: T::one() }
    }
}

impl<T: Scalar> EpsSchedule<T> {
    pub fn eps(&self, k: usize) -> T {
        let d = T::lit((k + 1) as f64);
        self.scale / (d * d)
    }

    /// `ε̄ = Σ_k ε_k = scale·π²/6`.
    pub fn total(&self) -> T {
        self.scale * T::PI() * T::PI() / T::lit(6.0)
    }
}

/// Parameters of the envelope, its inexact oracle, and the upper-level methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomeParams<T> {
    pub p: T,
    pub gamma: T,
    pub c1: T,
    pub c2: T,
    pub mu: T,
    /// Direction exponent: `d = −‖g‖^ω g`.
    pub omega: T,
    /// Exponent in the descent-pair condition; `ω + 1` for power directions.
    pub vartheta: T,
    pub eps: EpsSchedule<T>,
    pub armijo_lambda: T,
    pub armijo_upsilon: T,
    pub scenario: Scenario,
    pub lbar_growth: T,
    pub l0: T,
    pub max_lbar_trials: usize,
    pub max_backtracks: usize,
    pub grad_tol: T,
    pub inner: InnerSolverConfig<T>,
}

impl<T: Scalar> HomeParams<T> {
    /// Constants used for the sparse-recovery experiments, with the Hölder
    /// direction exponent `ω = (3−p)/(p−1)`.
    pub fn reference_defaults(p: T) -> Self {
        let omega = (T::lit(3.0) - p) / (p - T::one());
        Self {
            p,
            gamma: T::lit(0.9),
            c1: T::one(),
            c2: T::one(),
            mu: default_mu(p),
            omega,
            vartheta: omega + T::one(),
            eps: EpsSchedule::default(),
            armijo_lambda: T::lit(0.5),
            armijo_upsilon: T::lit(0.4),
            scenario: Scenario::S3,
            lbar_growth: T::lit(3.0),
            l0: T::lit(1e-3),
            max_lbar_trials: 60,
            max_backtracks: 50,
            grad_tol: T::lit(1e-8),
            inner: InnerSolverConfig::default(),
        }
    }

    /// Sets `ω` and the matching `ϑ = ω + 1`.
    pub fn with_omega(mut self, omega: T) -> Self {
        self.omega = omega;
        self.vartheta = omega + T::one();
        self
    }

    /// `ω = (3−p)/(p−1)`, the exponent required by the Hölder step rules.
    pub fn holder_omega(p: T) -> T {
        (T::lit(3.0) - p) / (p - T::one())
    }

    /// `ω ≈ (2−p)/(p−1)`, the empirically favourable Armijo exponent.
    pub fn armijo_omega(p: T) -> T {
        (T::lit(2.0) - p) / (p - T::one())
    }

    /// `c₁ − 2^{2−p}μ^{p−1}c₂`.
    pub fn descent_margin(&self) -> T {
        self.c1 - self.inexactness_factor() * self.c2
    }

    /// `2^{2−p}μ^{p−1}`.
    pub fn inexactness_factor(&self) -> T {
        T::lit(2.0).powf(T::lit(2.0) - self.p) * self.mu.powf(self.p - T::one())
    }

    /// `γ^{2/(p−1)}/c₂`, the cap shared by both Hölder step rules.
    pub fn step_cap(&self) -> T {
        self.gamma.powf(T::lit(2.0) / (self.p - T::one())) / self.c2
    }

    pub fn validate(&self) -> Result<()> {
        let (zero, one) = (T::zero(), T::one());
        if !(self.p > one && self.p <= T::lit(2.0)) {
            return Err(Error::Domain(format!("p must lie in (1, 2], got {}", self.p)));
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("c1", self.c1),
            ("c2", self.c2),
            ("mu", self.mu),
            ("vartheta", self.vartheta),
            ("L0", self.l0),
            ("eps scale", self.eps.scale),
        ] {
            if !(v > zero && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.grad_tol >= zero) {
            return Err(Error::InvalidParameter("grad_tol must be nonnegative".into()));
        }
        for (name, v) in [("armijo_lambda", self.armijo_lambda), ("armijo_upsilon", self.armijo_upsilon)] {
            if !(v > zero && v < one) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if !(self.lbar_growth > one) {
            return Err(Error::InvalidParameter(format!("Lbar growth must exceed 1, got {}", self.lbar_growth)));
        }
        let mu_max = (self.c1 / (self.c2 * T::lit(2.0).powf(T::lit(2.0) - self.p))).powf((self.p - one).recip());
        if !(self.mu < mu_max) {
            return Err(Error::Hypothesis(format!(
                "mu = {} must be below (c1/(c2·2^(2-p)))^(1/(p-1)) = {mu_max}",
                self.mu
            )));
        }
        self.inner.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_margin_positive() {
        for &p in &[1.25_f64, 1.5, 1.75, 2.0] {
            let hp = HomeParams::reference_defaults(p);
            hp.validate().unwrap();
            assert!((hp.descent_margin() - (1.0 - 0.9f64.powf(p - 1.0))).abs() < 1e-14);
            assert!((hp.vartheta - 2.0 / (p - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn mu_hypothesis_enforced() {
        let mut hp = HomeParams::reference_defaults(2.0_f64);
        hp.mu = 1.0;
        assert!(matches!(hp.validate(), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn eps_schedule_sum() {
        let s = EpsSchedule { scale: 1.0_f64 };
        assert_eq!(s.eps(0), 1.0);
        assert_eq!(s.eps(2), 1.0 / 9.0);
        let partial: f64 = (0..100_000).map(|k| s.eps(k)).sum();
        assert!(partial < s.total());
        assert!((s.total() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
    }

    #[test]
    fn scenario_parse_roundtrip() {
        for s in [Scenario::S1, Scenario::S2, Scenario::S3] {
            assert_eq!(s.to_string().parse::<Scenario>().unwrap(), s);
        }
        assert!("s4".parse::<Scenario>().is_err());
    }
}
