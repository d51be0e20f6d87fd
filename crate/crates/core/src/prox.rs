//! Lower level: approximate high-order proximal points and the inexact
//! envelope oracle built from them.
//!
//! The subproblem `min_y Φ(y) = φ(y) + ‖x − y‖^p / (pγ)` is solved by a
//! normalized subgradient method started at `y⁰ = x`. The value and gradient
//! of the envelope are then read off the returned point `y_ε`:
//! `F_ε(x) = Φ(y_ε)` and `∇F_ε(x) = γ⁻¹‖x − y_ε‖^{p−2}(x − y_ε)`.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::envelope::{exact_envelope_oracle, GridSpec};
use crate::linalg::{dist, norm, power_map};
use crate::objective::WeaklyConvexFn;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InnerStepKind {
    /// `α_0` on the first two steps, then `α_0^k`.
    #[default]
    DecayingStep,
    ConstantStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    default,
    deny_unknown_fields,
    bound(serialize = "T: Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct InnerSolverConfig<T> {
    pub kind: InnerStepKind,
    pub alpha0: T,
    pub max_iters: usize,
    pub move_tol: T,
}

impl<T: Scalar> Default for InnerSolverConfig<T> {
    fn default() -> Self {
        Self {
            kind: InnerStepKind::DecayingStep,
            alpha0: T::lit(0.95),
            max_iters: 200,
            move_tol: T::lit(1e-3),
        }
    }
}

impl<T: Scalar> InnerSolverConfig<T> {
    /// A configuration that drives the decaying step far below the default tolerance.
    pub fn tight() -> Self {
        Self {
            max_iters: 5000,
            move_tol: T::lit(1e-13),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("inner max_iters must be ≥ 1".into()));
        }
        if !(self.move_tol >= T::zero()) {
            return Err(Error::InvalidParameter("inner move_tol must be ≥ 0".into()));
        }
        let ok = match self.kind {
            InnerStepKind::DecayingStep => self.alpha0 > T::zero() && self.alpha0 <= T::one(),
            InnerStepKind::ConstantStep => self.alpha0 > T::zero() && self.alpha0.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("inner alpha0 out of range: {}", self.alpha0)))
        }
    }

    /// Step length at inner iteration `k` (counted from zero).
    pub fn step(&self, k: usize) -> T {
        match self.kind {
            InnerStepKind::DecayingStep => self.alpha0.powi(k.max(1) as i32),
            InnerStepKind::ConstantStep => self.alpha0,
        }
    }
}

/// Raw output of the inner subgradient method.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolve<T> {
    /// Lowest-objective iterate encountered.
    pub y_best: Array1<T>,
    pub best_value: T,
    pub iters: usize,
    /// Length of the last step taken (`+∞` if no step was taken).
    pub last_move: T,
    /// True when a zero subgradient of the subproblem was met.
    pub stationary: bool,
}

fn prox_objective<T: Scalar, F: WeaklyConvexFn<T> + ?Sized>(f: &F, p: T, gamma: T, x: &Array1<T>, y: &Array1<T>) -> T {
    f.value(y) + dist(x, y).powf(p) / (p * gamma)
}

fn check_p_gamma<T: Scalar>(p: T, gamma: T) -> Result<()> {
    if !(p > T::one() && p <= T::lit(2.0)) {
        return Err(Error::Domain(format!("p must lie in (1, 2], got {p}")));
    }
    if !(gamma > T::zero()) {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    Ok(())
}

/// Normalized subgradient method on the proximal subproblem.
pub fn sg_inner_solve<T: Scalar, F: WeaklyConvexFn<T> + ?Sized>(
    f: &F,
    p: T,
    gamma: T,
    x: &Array1<T>,
    cfg: &InnerSolverConfig<T>,
) -> Result<InnerSolve<T>> {
    check_p_gamma(p, gamma)?;
    cfg.validate()?;
    crate::error::check_dim(f.dim(), x.len())?;
    let scale = (p * gamma).recip();
    let mut y = x.clone();
    let mut best = InnerSolve {
        y_best: y.clone(),
        best_value: T::infinity(),
        iters: 0,
        last_move: T::infinity(),
        stationary: false,
    };
    for k in 0..=cfg.max_iters {
        let (fv, mut zeta) = f.value_and_subgradient(&y);
        let diff = &y - x;
        let value = fv + norm(&diff).powf(p) * scale;
        if value < best.best_value {
            best.best_value = value;
            best.y_best.assign(&y);
        }
        if k == cfg.max_iters {
            break;
        }
        zeta.scaled_add(gamma.recip(), &power_map(&diff, p));
        let zn = norm(&zeta);
        if zn == T::zero() {
            best.stationary = true;
            break;
        }
        let alpha = cfg.step(k);
        y.scaled_add(-alpha / zn, &zeta);
        best.iters = k + 1;
        best.last_move = alpha;
        if alpha < cfg.move_tol {
            let value = f.value(&y) + dist(&y, x).powf(p) * scale;
            if value < best.best_value {
                best.best_value = value;
                best.y_best.assign(&y);
            }
            break;
        }
    }
    Ok(best)
}

/// Approximate prox point with its `(ε, δ, μ)` certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxCertificate<T> {
    pub y_eps: Array1<T>,
    /// Objective-gap budget granted to this solve.
    pub eps_k: T,
    /// Distance to the exact prox when known, otherwise the last inner step length.
    pub delta_k: T,
    pub mu: T,
    pub inner_iters: usize,
    /// `δ_k ≤ μ‖x − y_ε‖` verified against an exact prox point.
    pub certified: bool,
    /// Realized gap `Φ(y_ε) − min Φ`, available only with an exact prox point.
    pub eps_gap: Option<T>,
    /// Whether `delta_k` is a true distance rather than a movement proxy.
    pub exact_reference: bool,
}

/// Builds the certificate for `y_eps`. With an exact prox point the true `δ` and
/// `ε`-gap are computed and the relative condition is checked; without one the
/// last inner movement stands in for `δ` and the certificate stays unverified.
#[allow(clippy::too_many_arguments)]
pub fn certify<T: Scalar, F: WeaklyConvexFn<T> + ?Sized>(
    f: &F,
    p: T,
    gamma: T,
    mu: T,
    x: &Array1<T>,
    y_eps: &Array1<T>,
    eps_budget: T,
    movement: T,
    inner_iters: usize,
    exact_prox: Option<&Array1<T>>,
) -> ProxCertificate<T> {
    match exact_prox {
        Some(y_star) => {
            let delta = dist(y_eps, y_star);
            let gap = prox_objective(f, p, gamma, x, y_eps) - prox_objective(f, p, gamma, x, y_star);
            ProxCertificate {
                y_eps: y_eps.clone(),
                eps_k: eps_budget,
                delta_k: delta,
                mu,
                inner_iters,
                certified: delta <= mu * dist(x, y_eps),
                eps_gap: Some(gap.max(T::zero())),
                exact_reference: true,
            }
        }
        None => ProxCertificate {
            y_eps: y_eps.clone(),
            eps_k: eps_budget,
            delta_k: movement,
            mu,
            inner_iters,
            certified: false,
            eps_gap: None,
            exact_reference: false,
        },
    }
}

/// Inexact envelope value and gradient at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct InexactOracle<T> {
    pub x: Array1<T>,
    pub value_eps: T,
    pub grad_eps: Array1<T>,
    pub cert: ProxCertificate<T>,
}

impl<T: Scalar> InexactOracle<T> {
    pub fn grad_norm(&self) -> T {
        norm(&self.grad_eps)
    }
}

/// Assembles the inexact value and gradient from a certificate.
pub fn assemble<T: Scalar, F: WeaklyConvexFn<T> + ?Sized>(
    f: &F,
    p: T,
    gamma: T,
    x: &Array1<T>,
    cert: ProxCertificate<T>,
) -> InexactOracle<T> {
    let diff = x - &cert.y_eps;
    let value_eps = f.value(&cert.y_eps) + norm(&diff).powf(p) / (p * gamma);
    let grad_eps = power_map(&diff, p) / gamma;
    InexactOracle { x: x.clone(), value_eps, grad_eps, cert }
}

/// Default relative-accuracy constant `μ = 0.9·(2^{p−2})^{1/(p−1)}`, for which
/// `2^{2−p}μ^{p−1} = 0.9^{p−1}`.
pub fn default_mu<T: Scalar>(p: T) -> T {
    T::lit(0.9) * T::lit(2.0).powf(p - T::lit(2.0)).powf((p - T::one()).recip())
}

/// Subgradient inner solve followed by assembly of the oracle, with the default `μ`.
pub fn inexact_oracle<T: Scalar, F: WeaklyConvexFn<T> + ?Sized>(
    f: &F,
    p: T,
    gamma: T,
    x: &Array1<T>,
    cfg: &InnerSolverConfig<T>,
) -> Result<InexactOracle<T>> {
    SubgradientProx { p, gamma, mu: default_mu(p), inner: *cfg }.evaluate(f, x, T::zero())
}

/// Source of inexact envelope oracles used by the upper-level drivers.
pub trait ProxOracle<T: Scalar>: Sync {
    fn p(&self) -> T;
    fn gamma(&self) -> T;
    fn evaluate<F: WeaklyConvexFn<T> + ?Sized>(&self, f: &F, x: &Array1<T>, eps_k: T) -> Result<InexactOracle<T>>;
}

/// Oracle backed by [`sg_inner_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgradientProx<T> {
    pub p: T,
    pub gamma: T,
    pub mu: T,
    pub inner: InnerSolverConfig<T>,
}

impl<T: Scalar> ProxOracle<T> for SubgradientProx<T> {
    fn p(&self) -> T {
        self.p
    }
    fn gamma(&self) -> T {
        self.gamma
    }
    fn evaluate<F: WeaklyConvexFn<T> + ?Sized>(&self, f: &F, x: &Array1<T>, eps_k: T) -> Result<InexactOracle<T>> {
        let solve = sg_inner_solve(f, self.p, self.gamma, x, &self.inner)?;
        let cert = certify(
            f, self.p, self.gamma, self.mu, x, &solve.y_best, eps_k, solve.last_move, solve.iters, None,
        );
        Ok(assemble(f, self.p, self.gamma, x, cert))
    }
}

/// Oracle backed by the brute-force grid minimizer (dimension one or two).
/// The grid is rebuilt around each query point so that it covers every prox point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridProx<T> {
    pub p: T,
    pub gamma: T,
    pub mu: T,
    pub points_per_axis: usize,
}

impl<T: Scalar> GridProx<T> {
    pub fn new(p: T, gamma: T) -> Self {
        Self { p, gamma, mu: default_mu(p), points_per_axis: GridSpec::<T>::DEFAULT_POINTS }
    }

    pub fn prox<F: WeaklyConvexFn<T> + ?Sized>(&self, f: &F, x: &Array1<T>) -> Result<Array1<T>> {
        let mut grid = GridSpec::covering(f, self.p, self.gamma, x)?;
        grid.points_per_axis = self.points_per_axis;
        Ok(exact_envelope_oracle(f, self.p, self.gamma, x, &grid)?.argmin)
    }
}

impl<T: Scalar> ProxOracle<T> for GridProx<T> {
    fn p(&self) -> T {
        self.p
    }
    fn gamma(&self) -> T {
        self.gamma
    }
    fn evaluate<F: WeaklyConvexFn<T> + ?Sized>(&self, f: &F, x: &Array1<T>, eps_k: T) -> Result<InexactOracle<T>> {
        let y = self.prox(f, x)?;
        let cert = certify(f, self.p, self.gamma, self.mu, x, &y, eps_k, T::zero(), 0, Some(&y));
        Ok(assemble(f, self.p, self.gamma, x, cert))
    }
}

/// Closed-form prox of `½‖·‖²`: `prox(x) = s·x` with `s ∈ [0, 1]` solving
/// `s = (1 − s)^{p−1}‖x‖^{p−2}/γ`. The envelope gradient equals `s·x`.
pub fn half_squared_norm_prox<T: Scalar>(p: T, gamma: T, x: &Array1<T>) -> Array1<T> {
    let r = norm(x);
    if r == T::zero() {
        return x.clone();
    }
    let c = r.powf(p - T::lit(2.0)) / gamma;
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..200 {
        let s = (lo + hi) / T::lit(2.0);
        if s - c * (T::one() - s).powf(p - T::one()) > T::zero() {
            hi = s;
        } else {
            lo = s;
        }
        if hi - lo <= T::epsilon() {
            break;
        }
    }
    x * ((lo + hi) / T::lit(2.0))
}

/// Exact oracle for `φ = ½‖·‖²` in any dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticProx<T> {
    pub p: T,
    pub gamma: T,
    pub mu: T,
}

impl<T: Scalar> QuadraticProx<T> {
    pub fn new(p: T, gamma: T) -> Self {
        Self { p, gamma, mu: default_mu(p) }
    }
}

impl<T: Scalar> ProxOracle<T> for QuadraticProx<T> {
    fn p(&self) -> T {
        self.p
    }
    fn gamma(&self) -> T {
        self.gamma
    }
    fn evaluate<F: WeaklyConvexFn<T> + ?Sized>(&self, f: &F, x: &Array1<T>, eps_k: T) -> Result<InexactOracle<T>> {
        check_p_gamma(self.p, self.gamma)?;
        crate::error::check_dim(f.dim(), x.len())?;
        let y = half_squared_norm_prox(self.p, self.gamma, x);
        let cert = certify(f, self.p, self.gamma, self.mu, x, &y, eps_k, T::zero(), 0, Some(&y));
        Ok(assemble(f, self.p, self.gamma, x, cert))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{AbsSum, DoubleWell, HalfSquaredNorm, Zero};
    use ndarray::array;

    #[test]
    fn zero_function_returns_x() {
        let x = array![0.3_f64, -1.2];
        let s = sg_inner_solve(&Zero { dim: 2 }, 1.5, 0.9, &x, &InnerSolverConfig::default()).unwrap();
        assert!(s.stationary);
        assert_eq!(s.y_best, x);
        assert_eq!(s.iters, 0);
        let o = inexact_oracle(&Zero { dim: 2 }, 1.5, 0.9, &x, &InnerSolverConfig::default()).unwrap();
        assert_eq!(o.value_eps, 0.0);
        assert!(o.grad_eps.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn abs_first_step_has_length_alpha0() {
        let cfg = InnerSolverConfig { max_iters: 1, ..InnerSolverConfig::default() };
        let x = array![1.0_f64];
        let s = sg_inner_solve(&AbsSum { dim: 1 }, 1.5, 0.9, &x, &cfg).unwrap();
        assert_eq!(s.iters, 1);
        assert!((s.last_move - 0.95).abs() < 1e-15);
        // Φ(0.05) = 0.05 + 0.95^{1.5}/1.35 < Φ(1) = 1, so the step is kept.
        assert!((s.y_best[0] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn decaying_schedule_literal() {
        let cfg = InnerSolverConfig::<f64>::default();
        assert_eq!(cfg.step(0), 0.95);
        assert_eq!(cfg.step(1), 0.95);
        assert!((cfg.step(2) - 0.9025).abs() < 1e-15);
    }

    #[test]
    fn double_well_p15_prox_near_zero() {
        let s = sg_inner_solve(&DoubleWell { dim: 1 }, 1.5, 0.6, &array![0.0_f64], &InnerSolverConfig::default()).unwrap();
        assert!(s.y_best[0].abs() < 5e-2);
    }

    #[test]
    fn certify_quadratic_closed_form() {
        let f = HalfSquaredNorm { dim: 1 };
        let x = array![1.0_f64];
        let c = certify(&f, 2.0, 1.0, 0.45, &x, &array![0.6], 0.1, 0.0, 3, Some(&array![0.5]));
        assert!((c.delta_k - 0.1).abs() < 1e-15);
        let gap = (0.18 + 0.08) - (0.125 + 0.125);
        assert!((c.eps_gap.unwrap() - gap).abs() < 1e-15);
        assert!(c.certified);
        let c = certify(&f, 2.0, 1.0, 0.2, &x, &array![0.6], 0.1, 0.0, 3, Some(&array![0.5]));
        assert!(!c.certified);
        let exact = certify(&f, 2.0, 1.0, 0.2, &x, &array![0.5], 0.1, 0.0, 3, Some(&array![0.5]));
        assert_eq!(exact.delta_k, 0.0);
        assert_eq!(exact.eps_gap, Some(0.0));
    }

    #[test]
    fn proxy_certificate_is_unverified() {
        let x = array![2.0_f64];
        let o = inexact_oracle(&AbsSum { dim: 1 }, 1.5, 0.9, &x, &InnerSolverConfig::default()).unwrap();
        assert!(!o.cert.certified && !o.cert.exact_reference);
        assert!(o.cert.inner_iters <= 200);
    }

    #[test]
    fn quadratic_gradient_closed_form() {
        let f = HalfSquaredNorm { dim: 1 };
        let o = QuadraticProx::new(2.0, 1.0).evaluate(&f, &array![1.0_f64], 0.0).unwrap();
        assert!((o.grad_eps[0] - 0.5).abs() < 1e-15);
        let o = inexact_oracle(&f, 2.0, 1.0, &array![1.0_f64], &InnerSolverConfig::tight()).unwrap();
        assert!((o.grad_eps[0] - 0.5).abs() < 1e-7);
    }

    #[test]
    fn quadratic_prox_satisfies_optimality() {
        for &p in &[1.1_f64, 1.25, 1.5, 1.75, 2.0] {
            let x = array![0.3, -2.0, 1.1];
            let y = half_squared_norm_prox(p, 0.7, &x);
            let resid = &y - &power_map(&(&x - &y), p) / 0.7;
            assert!(norm(&resid) < 1e-12, "p={p}");
        }
    }

    #[test]
    fn default_mu_margin() {
        for &p in &[1.25_f64, 1.5, 2.0] {
            let mu = default_mu(p);
            let lhs = 2f64.powf(2.0 - p) * mu.powf(p - 1.0);
            assert!((lhs - 0.9f64.powf(p - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = Zero { dim: 1 };
        let x = array![0.0_f64];
        assert!(sg_inner_solve(&f, 2.5, 0.9, &x, &InnerSolverConfig::default()).is_err());
        assert!(sg_inner_solve(&f, 1.5, 0.0, &x, &InnerSolverConfig::default()).is_err());
        let bad = InnerSolverConfig { alpha0: 1.5, ..InnerSolverConfig::default() };
        assert!(sg_inner_solve(&f, 1.5, 0.9, &x, &bad).is_err());
        assert!(sg_inner_solve(&f, 1.5, 0.9, &array![0.0, 1.0], &InnerSolverConfig::default()).is_err());
    }
}
