//! Robust sparse recovery: `min ‖Ax − y‖₁ + λ̄ Σ f_σ(xᵢ)` with the clipped quadratic penalty.

use ndarray::{Array1, Array2};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::penalty::{clipped_quadratic, clipped_quadratic_subgrad};
use super::WeaklyConvexFn;
use crate::error::check_dim;
use crate::linalg::sign;
use crate::{Error, Result, Scalar};

/// Distribution of the nonzero entries of the ground-truth signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SignalDistribution {
    #[default]
    StandardNormal,
    /// Random signs `±1`.
    Rademacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceParams {
    pub n: usize,
    pub m: usize,
    pub k1: usize,
    pub k2: usize,
    pub sigma: f64,
    pub lambda_bar: f64,
    pub seed: u64,
    #[serde(default)]
    pub signal: SignalDistribution,
}

impl InstanceParams {
    /// Full-scale setup: `n = 1000`, `m = 500`, `k1 = 50`, `k2 = 30`, `σ = 1`, `λ̄ = 0.1`.
    pub fn full_scale(seed: u64) -> Self {
        Self {
            n: 1000,
            m: 500,
            k1: 50,
            k2: 30,
            sigma: 1.0,
            lambda_bar: 0.1,
            seed,
            signal: SignalDistribution::StandardNormal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidParameter("n and m must be positive".into()));
        }
        if self.k1 > self.n {
            return Err(Error::InvalidParameter(format!(
                "k1 = {} exceeds n = {}",
                self.k1, self.n
            )));
        }
        if self.k2 > self.m {
            return Err(Error::InvalidParameter(format!(
                "k2 = {} exceeds m = {}",
                self.k2, self.m
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.lambda_bar >= 0.0 && self.lambda_bar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda_bar must be nonnegative, got {}",
                self.lambda_bar
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseRecoveryInstance<T> {
    pub params: InstanceParams,
    /// `m × n` sensing matrix.
    pub a: Array2<T>,
    pub y: Array1<T>,
    pub x_true: Array1<T>,
    /// The `k2`-sparse corruption `e` with `y = A x_true + e`.
    pub noise: Array1<T>,
}

impl<T: Scalar> SparseRecoveryInstance<T> {
    pub fn sigma(&self) -> T {
        T::lit(self.params.sigma)
    }

    pub fn lambda_bar(&self) -> T {
        T::lit(self.params.lambda_bar)
    }
}

fn nonzero_draw<R: Rng, D: Distribution<f64>>(rng: &mut R, dist: &D) -> f64 {
    loop {
        let v = dist.sample(rng);
        if v != 0.0 {
            return v;
        }
    }
}

/// Draws `A` with i.i.d. `N(0, 1/m)` entries (row-major order), a `k1`-sparse
/// signal on a uniformly random support, and a `k2`-sparse corruption with
/// `N(2, 1)` nonzeros. Deterministic in `params.seed`.
pub fn generate_instance<T: Scalar>(params: InstanceParams) -> Result<SparseRecoveryInstance<T>> {
    params.validate()?;
    let InstanceParams { n, m, k1, k2, .. } = params;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let entry = Normal::new(0.0, (1.0 / m as f64).sqrt())
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let a = Array2::from_shape_fn((m, n), |_| T::lit(entry.sample(&mut rng)));

    let mut x_true = Array1::zeros(n);
    let mut support = sample(&mut rng, n, k1).into_vec();
    support.sort_unstable();
    for i in support {
        let v = match params.signal {
            SignalDistribution::StandardNormal => nonzero_draw(&mut rng, &StandardNormal),
            SignalDistribution::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        x_true[i] = T::lit(v);
    }

    let corruption = Normal::new(2.0, 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut noise = Array1::zeros(m);
    let mut noise_support = sample(&mut rng, m, k2).into_vec();
    noise_support.sort_unstable();
    for i in noise_support {
        noise[i] = T::lit(nonzero_draw(&mut rng, &corruption));
    }

    let y = a.dot(&x_true) + &noise;
    Ok(SparseRecoveryInstance {
        params,
        a,
        y,
        x_true,
        noise,
    })
}

/// `‖Ax − y‖₁ + λ̄ Σᵢ f_σ(xᵢ)`.
pub fn rsr_value<T: Scalar>(inst: &SparseRecoveryInstance<T>, x: &Array1<T>) -> Result<T> {
    check_dim(inst.params.n, x.len())?;
    Ok(value_unchecked(inst, x))
}

/// `Aᵀ sign(Ax − y) + λ̄ g` with `sign(0) = 0` and `g` the componentwise penalty subgradient.
pub fn rsr_subgrad<T: Scalar>(
    inst: &SparseRecoveryInstance<T>,
    x: &Array1<T>,
) -> Result<Array1<T>> {
    check_dim(inst.params.n, x.len())?;
    Ok(value_and_subgrad_unchecked(inst, x).1)
}

fn value_unchecked<T: Scalar>(inst: &SparseRecoveryInstance<T>, x: &Array1<T>) -> T {
    let residual = inst.a.dot(x) - &inst.y;
    let sigma = inst.sigma();
    let fit = residual.iter().fold(T::zero(), |acc, r| acc + r.abs());
    let penalty = x
        .iter()
        .fold(T::zero(), |acc, &v| acc + clipped_quadratic(v, sigma));
    fit + inst.lambda_bar() * penalty
}

fn value_and_subgrad_unchecked<T: Scalar>(
    inst: &SparseRecoveryInstance<T>,
    x: &Array1<T>,
) -> (T, Array1<T>) {
    let residual = inst.a.dot(x) - &inst.y;
    let sigma = inst.sigma();
    let lambda = inst.lambda_bar();
    let fit = residual.iter().fold(T::zero(), |acc, r| acc + r.abs());
    let penalty = x
        .iter()
        .fold(T::zero(), |acc, &v| acc + clipped_quadratic(v, sigma));
    let signs = residual.mapv(sign);
    let mut g = inst.a.t().dot(&signs);
    g.zip_mut_with(x, |gi, &xi| *gi = *gi + lambda * clipped_quadratic_subgrad(xi, sigma));
    (fit + lambda * penalty, g)
}

impl<T: Scalar> WeaklyConvexFn<T> for SparseRecoveryInstance<T> {
    fn dim(&self) -> usize {
        self.params.n
    }

    /// `2λ̄σ²`: the ℓ1 fit is convex and each penalty term is `2σ²`-weakly convex.
    fn rho(&self) -> T {
        T::lit(2.0) * self.lambda_bar() * self.sigma() * self.sigma()
    }

    fn lower_bound(&self) -> Option<T> {
        Some(T::zero())
    }

    fn value(&self, x: &Array1<T>) -> T {
        value_unchecked(self, x)
    }

    fn subgradient(&self, x: &Array1<T>) -> Array1<T> {
        value_and_subgrad_unchecked(self, x).1
    }

    fn value_and_subgradient(&self, x: &Array1<T>) -> (T, Array1<T>) {
        value_and_subgrad_unchecked(self, x)
    }
}
