use serde::{Deserialize, Serialize};

use crate::clock::ClockMode;
use crate::itsdeal::{EpsSchedule, HomeParams, Scenario};
use crate::objective::{InstanceParams, SignalDistribution};
use crate::prox::{default_mu, InnerSolverConfig};
use crate::{Error, Result};

/// Envelope and line-search constants shared by every algorithm in a roster.
/// Omitted fields fall back to the experiment defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomeSettings {
    pub gamma: f64,
    pub c1: f64,
    pub c2: f64,
    /// `None` selects `0.9·(2^{p−2})^{1/(p−1)}`.
    pub mu: Option<f64>,
    pub eps_scale: f64,
    pub armijo_lambda: f64,
    pub armijo_upsilon: f64,
    pub lbar_growth: f64,
    pub l0: f64,
    pub max_lbar_trials: usize,
    pub max_backtracks: usize,
    pub grad_tol: f64,
    pub inner: InnerSolverConfig<f64>,
}

impl Default for HomeSettings {
    fn default() -> Self {
        let d = HomeParams::<f64>::reference_defaults(1.5);
        Self {
            gamma: d.gamma,
            c1: d.c1,
            c2: d.c2,
            mu: None,
            eps_scale: d.eps.scale,
            armijo_lambda: d.armijo_lambda,
            armijo_upsilon: d.armijo_upsilon,
            lbar_growth: d.lbar_growth,
            l0: d.l0,
            max_lbar_trials: d.max_lbar_trials,
            max_backtracks: d.max_backtracks,
            grad_tol: d.grad_tol,
            inner: d.inner,
        }
    }
}

impl HomeSettings {
    /// Resolves the settings for power `p`, direction exponent `omega`, and `scenario`.
    pub fn resolve(&self, p: f64, omega: f64, scenario: Scenario) -> Result<HomeParams<f64>> {
        let hp = HomeParams {
            p,
            gamma: self.gamma,
            c1: self.c1,
            c2: self.c2,
            mu: self.mu.unwrap_or_else(|| default_mu(p)),
            omega,
            vartheta: omega + 1.0,
            eps: EpsSchedule { scale: self.eps_scale },
            armijo_lambda: self.armijo_lambda,
            armijo_upsilon: self.armijo_upsilon,
            scenario,
            lbar_growth: self.lbar_growth,
            l0: self.l0,
            max_lbar_trials: self.max_lbar_trials,
            max_backtracks: self.max_backtracks,
            grad_tol: self.grad_tol,
            inner: self.inner,
        };
        hp.validate()?;
        Ok(hp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "alg", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    SgDss {
        #[serde(default = "default_alpha0")]
        alpha0: f64,
    },
    SgCss {
        alpha: f64,
    },
    PfHigda {
        p: f64,
        #[serde(default)]
        scenario: Scenario,
    },
    Ideals {
        p: f64,
        /// Defaults to `(2−p)/(p−1)`.
        #[serde(default)]
        omega: Option<f64>,
    },
    Higda {
        p: f64,
        /// Envelope-gradient Hölder constant `𝓛_p`.
        #[serde(default)]
        cal_l: Option<f64>,
        /// Radius of the ball on which `𝓛_p` is estimated when `cal_l` is absent.
        #[serde(default)]
        radius: Option<f64>,
        /// Cap `γ_max > γ` used together with `radius`.
        #[serde(default)]
        gamma_max: Option<f64>,
    },
}

/// Message for a HiGDA entry without any way to obtain `𝓛_p`.
pub const MISSING_CAL_L: &str =
    "higda requires the envelope-gradient Hölder bound cal_l (or radius and gamma_max to estimate it)";

fn default_alpha0() -> f64 {
    0.95
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v}");
    s.replace('-', "m")
}

impl AlgorithmSpec {
    /// Filesystem-safe label, unique within a roster of distinct entries.
    pub fn label(&self) -> String {
        match *self {
            AlgorithmSpec::SgDss { alpha0 } => format!("sg-dss-a{}", fmt_num(alpha0)),
            AlgorithmSpec::SgCss { alpha } => format!("sg-css-a{}", fmt_num(alpha)),
            AlgorithmSpec::PfHigda { p, scenario } => format!("pf-higda-p{}-{scenario}", fmt_num(p)),
            AlgorithmSpec::Ideals { p, omega } => {
                format!("ideals-p{}-w{}", fmt_num(p), fmt_num(omega.unwrap_or_else(|| HomeParams::armijo_omega(p))))
            }
            AlgorithmSpec::Higda { p, cal_l: Some(l), .. } => format!("higda-p{}-L{}", fmt_num(p), fmt_num(l)),
            AlgorithmSpec::Higda { p, cal_l: None, radius, gamma_max } => format!(
                "higda-p{}-r{}-g{}",
                fmt_num(p),
                fmt_num(radius.unwrap_or(f64::NAN)),
                fmt_num(gamma_max.unwrap_or(f64::NAN))
            ),
        }
    }

    pub fn validate(&self, home: &HomeSettings) -> Result<()> {
        match *self {
            AlgorithmSpec::SgDss { alpha0 } if !(alpha0 > 0.0 && alpha0 <= 1.0) => {
                Err(Error::InvalidParameter(format!("sg-dss alpha0 must lie in (0, 1], got {alpha0}")))
            }
            AlgorithmSpec::SgCss { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::InvalidParameter(format!("sg-css alpha must be positive, got {alpha}")))
            }
            AlgorithmSpec::SgDss { .. } | AlgorithmSpec::SgCss { .. } => Ok(()),
            AlgorithmSpec::PfHigda { p, scenario } => home.resolve(p, HomeParams::holder_omega(p), scenario).map(|_| ()),
            AlgorithmSpec::Ideals { p, omega } => {
                home.resolve(p, omega.unwrap_or_else(|| HomeParams::armijo_omega(p)), Scenario::default()).map(|_| ())
            }
            AlgorithmSpec::Higda { p, cal_l, radius, gamma_max } => {
                match (cal_l, radius, gamma_max) {
                    (Some(l), _, _) if !(l > 0.0 && l.is_finite()) => {
                        return Err(Error::InvalidParameter(format!("higda needs a positive cal_l, got {l}")));
                    }
                    (Some(_), _, _) => {}
                    (None, Some(r), Some(g)) if r > 0.0 && g > home.gamma => {}
                    (None, Some(_), Some(_)) => {
                        return Err(Error::InvalidParameter(format!(
                            "higda safeguard needs radius > 0 and gamma_max > gamma = {}",
                            home.gamma
                        )));
                    }
                    _ => return Err(Error::InvalidParameter(MISSING_CAL_L.into())),
                }
                home.resolve(p, HomeParams::holder_omega(p), Scenario::default()).map(|_| ())
            }
        }
    }
}

/// Instance family; one instance per `(k1, trial)` cell. Omitted fields take
/// the full-scale values (`n = 1000`, `m = 500`, `k1 = 10, 20, …, 150`,
/// `k2 = 30`, `σ = 1`, `λ̄ = 0.1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceTemplate {
    pub n: usize,
    pub m: usize,
    pub k1: Vec<usize>,
    pub k2: usize,
    pub sigma: f64,
    pub lambda_bar: f64,
    pub signal: SignalDistribution,
}

impl Default for InstanceTemplate {
    fn default() -> Self {
        let p = InstanceParams::full_scale(0);
        Self {
            n: p.n,
            m: p.m,
            k1: (10..=150).step_by(10).collect(),
            k2: p.k2,
            sigma: p.sigma,
            lambda_bar: p.lambda_bar,
            signal: p.signal,
        }
    }
}

impl InstanceTemplate {
    pub fn params(&self, k1: usize, seed: u64) -> InstanceParams {
        InstanceParams {
            n: self.n,
            m: self.m,
            k1,
            k2: self.k2,
            sigma: self.sigma,
            lambda_bar: self.lambda_bar,
            seed,
            signal: self.signal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub instance: InstanceTemplate,
    pub algorithms: Vec<AlgorithmSpec>,
    pub time_budget_s: f64,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub clock: ClockMode,
    pub trials: usize,
    pub thresholds: Vec<f64>,
    pub master_seed: u64,
    #[serde(default)]
    pub home: HomeSettings,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.name.is_empty() || self.name.contains(['/', '\\']) || self.name.starts_with('.') {
            return bad(format!("experiment name {:?} is not a plain directory name", self.name));
        }
        if self.algorithms.is_empty() {
            return bad("algorithm roster is empty".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.time_budget_s > 0.0) {
            return bad(format!("time budget must be positive, got {}", self.time_budget_s));
        }
        if self.thresholds.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return bad("thresholds must lie in (0, 1)".into());
        }
        if self.instance.k1.is_empty() {
            return bad("k1 list is empty".into());
        }
        for &k1 in &self.instance.k1 {
            self.instance.params(k1, 0).validate()?;
        }
        let mut labels: Vec<String> = self.algorithms.iter().map(AlgorithmSpec::label).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != self.algorithms.len() {
            return bad("algorithm roster contains duplicates".into());
        }
        for a in &self.algorithms {
            a.validate(&self.home)?;
        }
        Ok(())
    }

    /// Desk-scale defaults: `n = 200`, `m = 100`, `k1 = 10`, `k2 = 6`.
    pub fn desk(name: &str) -> Self {
        Self {
            name: name.to_string(),
            instance: InstanceTemplate {
                n: 200,
                m: 100,
                k1: vec![10],
                k2: 6,
                sigma: 1.0,
                lambda_bar: 1.0,
                signal: SignalDistribution::StandardNormal,
            },
            algorithms: vec![
                AlgorithmSpec::Ideals { p: 1.25, omega: Some(3.0) },
                AlgorithmSpec::SgCss { alpha: 1.0 },
            ],
            time_budget_s: 5.0,
            max_iters: None,
            clock: ClockMode::Wall,
            trials: 10,
            thresholds: vec![1e-2, 1e-3],
            master_seed: 0,
            home: HomeSettings::default(),
        }
    }
}
