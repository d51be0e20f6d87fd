//! Self-checks of the numerical building blocks, grouped by topic.

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::envelope::{exact_envelope_minimizers, exact_envelope_oracle, kappa, solve_t_hat, t_hat_residual, GridSpec};
use crate::linalg::{dist, norm, power_map};
use crate::objective::{DoubleWell, HalfSquaredNorm};
use crate::prox::{default_mu, half_squared_norm_prox, GridProx};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupResult {
    pub group: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub groups: Vec<GroupResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.groups.iter().all(|g| g.passed)
    }
}

fn group(name: &str, checks: usize, failures: usize, detail: String) -> GroupResult {
    GroupResult { group: name.to_string(), passed: failures == 0, checks, failures, detail }
}

fn unit_ball_point(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Array1<f64> {
    loop {
        let v: Array1<f64> = (0..dim).map(|_| rng.random_range(-r..=r)).collect();
        if norm(&v) <= r {
            return v;
        }
    }
}

/// `t̂`, its residual, `κ(2) = 1`, and the two branch formulas on a sample.
pub fn verify_kappa() -> GroupResult {
    let mut checks = 0;
    let mut fails = Vec::new();
    let t_hat = solve_t_hat();
    let mut check = |ok: bool, what: String| {
        checks += 1;
        if !ok {
            fails.push(what);
        }
    };
    check((t_hat - 1.3214).abs() <= 5e-4, format!("t_hat = {t_hat}"));
    check(t_hat_residual(t_hat).abs() <= 1e-10, "residual at t_hat".into());
    check(kappa(2.0_f64).ok() == Some(1.0), "kappa(2) != 1".into());
    let s3 = 3f64.sqrt();
    for i in 1..=1000 {
        let t = 1.0 + i as f64 / 1000.0 * (t_hat - 1.0);
        let expect = (2.0 + s3) * (t - 1.0) / 16.0;
        check((kappa(t).unwrap() - expect).abs() <= 1e-12, format!("branch 1 at {t}"));
        let t = t_hat + (2.0 - t_hat) * (i as f64 - 0.5) / 1000.0;
        let expect = (2.0 + s3) / 16.0 * (1.0 - (3.0 - s3).powf(1.0 - t));
        check((kappa(t).unwrap() - expect).abs() <= 1e-12, format!("branch 2 at {t}"));
    }
    let detail = if fails.is_empty() { format!("t_hat={t_hat:.12}") } else { fails.join("; ") };
    group("kappa", checks, fails.len(), detail)
}

/// `⟨‖a‖^{p−2}a − ‖b‖^{p−2}b, a − b⟩ ≥ κ_p r^{p−2}‖a − b‖²` on random pairs in `B(0; r)`.
pub fn verify_basic_inequality(samples: usize, seed: u64) -> GroupResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let p = rng.random_range(1.01..=2.0);
        let r = rng.random_range(0.1..=10.0);
        let dim = rng.random_range(1..=5);
        let a = unit_ball_point(&mut rng, dim, r);
        let b = unit_ball_point(&mut rng, dim, r);
        let lhs = (power_map(&a, p) - power_map(&b, p)).dot(&(&a - &b));
        let rhs = kappa(p).unwrap() * r.powf(p - 2.0) * dist(&a, &b).powi(2);
        if rhs > 0.0 {
            worst = worst.min(lhs / rhs);
        }
        if lhs < rhs * (1.0 - 1e-12) {
            failures += 1;
        }
    }
    group("basic_inequality", samples, failures, format!("min lhs/rhs = {worst:.6}"))
}

/// The double-well prox at `x = 0`: unique minimizer `0` for `p = 1.5`, two
/// symmetric minimizers for `p = 3`.
pub fn verify_double_well_prox() -> GroupResult {
    let f = DoubleWell { dim: 1 };
    let x = Array1::from(vec![0.0_f64]);
    let mut fails = Vec::new();
    let grid = GridSpec::covering(&f, 1.5, 0.6, &x).expect("double well has a lower bound");
    match exact_envelope_minimizers(&f, 1.5, 0.6, &x, &grid, 1e-9) {
        Ok(m) if m.len() == 1 && m[0].argmin[0].abs() < 1e-6 => {}
        Ok(m) => fails.push(format!("p=1.5: minimizers {:?}", m.iter().map(|e| e.argmin[0]).collect::<Vec<_>>())),
        Err(e) => fails.push(format!("p=1.5: {e}")),
    }
    let detail3 = match exact_envelope_minimizers(&f, 3.0, 0.6, &x, &GridSpec::new(2.0), 1e-9) {
        Ok(m) if m.len() == 2 && (m[0].argmin[0] + m[1].argmin[0]).abs() < 1e-6 && m[0].argmin[0].abs() > 1e-3 => {
            format!("p=3 minimizers ±{:.6}", m[0].argmin[0].abs())
        }
        Ok(m) => {
            fails.push(format!("p=3: minimizers {:?}", m.iter().map(|e| e.argmin[0]).collect::<Vec<_>>()));
            String::new()
        }
        Err(e) => {
            fails.push(format!("p=3: {e}"));
            String::new()
        }
    };
    let n = fails.len();
    group("double_well_prox", 2, n, if n == 0 { detail3 } else { fails.join("; ") })
}

/// One `(x, y_ε)` pair with the exact prox point and the `δ` claimed for it.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedPair {
    pub p: f64,
    pub gamma: f64,
    pub x: Array1<f64>,
    pub y_exact: Array1<f64>,
    pub y_eps: Array1<f64>,
    pub delta_claimed: f64,
}

/// Builds pairs for `½y²` (closed form) and the double well (grid) in 1-D with
/// log-uniform perturbation sizes. With `understate`, the claimed `δ` is a
/// hundredth of the true distance.
pub fn perturbed_pairs(count: usize, seed: u64, understate: bool) -> Result<Vec<PerturbedPair>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let well = DoubleWell { dim: 1 };
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let p = [1.25, 1.5, 1.75, 2.0][i % 4];
        let gamma = rng.random_range(0.1..=1.0);
        let x = Array1::from(vec![rng.random_range(-2.0..=2.0)]);
        let y_exact = if i % 2 == 0 {
            half_squared_norm_prox(p, gamma, &x)
        } else {
            let g = 0.2 * gamma;
            let y = GridProx { points_per_axis: 2001, ..GridProx::new(p, g) }.prox(&well, &x)?;
            out.push(make_pair(&mut rng, p, g, x, y, understate));
            continue;
        };
        out.push(make_pair(&mut rng, p, gamma, x, y_exact, understate));
    }
    Ok(out)
}

fn make_pair(rng: &mut ChaCha8Rng, p: f64, gamma: f64, x: Array1<f64>, y_exact: Array1<f64>, understate: bool) -> PerturbedPair {
    let delta = 10f64.powf(rng.random_range(-6.0..=0.0));
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let y_eps = &y_exact + sign * delta;
    let true_delta = dist(&y_eps, &y_exact);
    PerturbedPair { p, gamma, x, y_exact, y_eps, delta_claimed: if understate { true_delta / 100.0 } else { true_delta } }
}

/// Counts of pairs violating the absolute and the relative gradient-error bounds.
pub fn gradient_bound_violations(pairs: &[PerturbedPair]) -> (usize, usize, usize) {
    let (mut abs_v, mut rel_v, mut rel_n) = (0, 0, 0);
    for pr in pairs {
        let g_eps = power_map(&(&pr.x - &pr.y_eps), pr.p) / pr.gamma;
        let g = power_map(&(&pr.x - &pr.y_exact), pr.p) / pr.gamma;
        let err = dist(&g_eps, &g);
        let factor = 2f64.powf(2.0 - pr.p);
        let slack = 1.0 + 1e-10;
        if err > factor / pr.gamma * pr.delta_claimed.powf(pr.p - 1.0) * slack + 1e-15 {
            abs_v += 1;
        }
        let mu = default_mu(pr.p);
        if pr.delta_claimed <= mu * dist(&pr.x, &pr.y_eps) {
            rel_n += 1;
            if err > factor * mu.powf(pr.p - 1.0) * norm(&g_eps) * slack + 1e-15 {
                rel_v += 1;
            }
        }
    }
    (abs_v, rel_v, rel_n)
}

pub fn verify_gradient_bounds(count: usize, seed: u64, understate: bool) -> GroupResult {
    match perturbed_pairs(count, seed, understate) {
        Ok(pairs) => {
            let (a, r, n) = gradient_bound_violations(&pairs);
            group(
                "gradient_error_bounds",
                pairs.len() + n,
                a + r,
                format!("absolute violations {a}/{}, relative violations {r}/{n}", pairs.len()),
            )
        }
        Err(e) => group("gradient_error_bounds", 1, 1, e.to_string()),
    }
}

/// Exact envelope of `½‖·‖²` in closed form.
pub fn quadratic_envelope(p: f64, gamma: f64, x: &Array1<f64>) -> f64 {
    let y = half_squared_norm_prox(p, gamma, x);
    0.5 * y.dot(&y) + dist(x, &y).powf(p) / (p * gamma)
}

/// Envelope gradient of `½‖·‖²` against central differences, dimensions 1–5.
pub fn verify_gradient_fd(points_per_dim: usize, seed: u64) -> GroupResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut checks, mut failures, mut worst) = (0, 0, 0.0_f64);
    for dim in 1..=5 {
        for _ in 0..points_per_dim {
            let p = rng.random_range(1.1..=2.0);
            let gamma = rng.random_range(0.2..=2.0);
            let x = loop {
                let x: Array1<f64> = (0..dim).map(|_| rng.random_range(-3.0..=3.0)).collect();
                if norm(&x) >= 0.1 {
                    break x;
                }
            };
            let y = half_squared_norm_prox(p, gamma, &x);
            let grad = power_map(&(&x - &y), p) / gamma;
            let h = 1e-5;
            let fd: Array1<f64> = (0..dim)
                .map(|i| {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    (quadratic_envelope(p, gamma, &xp) - quadratic_envelope(p, gamma, &xm)) / (2.0 * h)
                })
                .collect();
            let rel = dist(&grad, &fd) / norm(&grad).max(1e-12);
            worst = worst.max(rel);
            checks += 1;
            if rel > 1e-4 {
                failures += 1;
            }
        }
    }
    group("gradient_fd", checks, failures, format!("max relative error {worst:.3e}"))
}

/// Exact grid envelope value agrees with the closed form for `½y²`.
pub fn verify_grid_oracle() -> GroupResult {
    let f = HalfSquaredNorm { dim: 1 };
    let mut failures = 0;
    let xs = [-1.7, -0.3, 0.0, 0.4, 2.2];
    for &x in &xs {
        for &p in &[1.25, 1.5, 2.0] {
            let xv = Array1::from(vec![x]);
            let grid = GridSpec::covering(&f, p, 0.7, &xv).expect("bounded below");
            match exact_envelope_oracle(&f, p, 0.7, &xv, &grid) {
                Ok(pt) if (pt.value - quadratic_envelope(p, 0.7, &xv)).abs() <= 1e-9 => {}
                _ => failures += 1,
            }
        }
    }
    group("grid_oracle", xs.len() * 3, failures, String::new())
}

/// All groups with their default sample sizes and seeds.
pub fn run_all() -> VerifyReport {
    run_suite(false)
}

/// Like [`run_all`]; with `understate_delta` the gradient-bound group is fed
/// pairs whose claimed `δ` is too small, so it must fail.
pub fn run_suite(understate_delta: bool) -> VerifyReport {
    VerifyReport {
        groups: vec![
            verify_kappa(),
            verify_basic_inequality(10_000, 1),
            verify_double_well_prox(),
            verify_gradient_bounds(1000, 2, understate_delta),
            verify_gradient_fd(100, 3),
            verify_grid_oracle(),
        ],
    }
}
