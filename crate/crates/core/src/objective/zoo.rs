use ndarray::Array1;

use super::penalty::{clipped_quadratic, clipped_quadratic_subgrad};
use super::WeaklyConvexFn;
use crate::linalg::sign;
use crate::Scalar;

/// `φ ≡ 0`.
#[derive(Debug, Clone, Copy)]
pub struct Zero {
    pub dim: usize,
}

impl<T: Scalar> WeaklyConvexFn<T> for Zero {
    fn dim(&self) -> usize {
        self.dim
    }
    fn rho(&self) -> T {
        T::zero()
    }
    fn lower_bound(&self) -> Option<T> {
        Some(T::zero())
    }
    fn value(&self, _x: &Array1<T>) -> T {
        T::zero()
    }
    fn subgradient(&self, x: &Array1<T>) -> Array1<T> {
        Array1::zeros(x.len())
    }
}

/// `φ(y) = ½‖y‖²`.
#[derive(Debug, Clone, Copy)]
pub struct HalfSquaredNorm {
    pub dim: usize,
}

impl<T: Scalar> WeaklyConvexFn<T> for HalfSquaredNorm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn rho(&self) -> T {
        T::zero()
    }
    fn lower_bound(&self) -> Option<T> {
        Some(T::zero())
    }
    fn value(&self, x: &Array1<T>) -> T {
        x.dot(x) * T::lit(0.5)
    }
    fn subgradient(&self, x: &Array1<T>) -> Array1<T> {
        x.clone()
    }
}

/// Separable double well `φ(y) = Σ yᵢ⁴ − yᵢ²`; 2-weakly convex since `φ'' ≥ −2`.
#[derive(Debug, Clone, Copy)]
pub struct DoubleWell {
    pub dim: usize,
}

impl<T: Scalar> WeaklyConvexFn<T> for DoubleWell {
    fn dim(&self) -> usize {
        self.dim
    }
    fn rho(&self) -> T {
        T::lit(2.0)
    }
    fn lower_bound(&self) -> Option<T> {
        Some(T::lit(-0.25 * self.dim as f64))
    }
    fn value(&self, x: &Array1<T>) -> T {
        x.iter().fold(T::zero(), |acc, &v| {
            let v2 = v * v;
            acc + v2 * v2 - v2
        })
    }
    fn subgradient(&self, x: &Array1<T>) -> Array1<T> {
        x.mapv(|v| T::lit(4.0) * v * v * v - T::lit(2.0) * v)
    }
}

/// `φ(y) = ‖y‖₁`, with `sign(0) = 0`.
#[derive(Debug, Clone, Copy)]
pub struct AbsSum {
    pub dim: usize,
}

impl<T: Scalar> WeaklyConvexFn<T> for AbsSum {
    fn dim(&self) -> usize {
        self.dim
    }
    fn rho(&self) -> T {
        T::zero()
    }
    fn lower_bound(&self) -> Option<T> {
        Some(T::zero())
    }
    fn value(&self, x: &Array1<T>) -> T {
        x.iter().fold(T::zero(), |acc, &v| acc + v.abs())
    }
    fn subgradient(&self, x: &Array1<T>) -> Array1<T> {
        x.mapv(sign)
    }
}

/// `φ(y) = Σ f_σ(yᵢ)` with the clipped quadratic penalty; `2σ²`-weakly convex.
#[derive(Debug, Clone, Copy)]
pub struct ClippedQuadraticSum<T> {
    pub dim: usize,
    pub sigma: T,
}

impl<T: Scalar> WeaklyConvexFn<T> for ClippedQuadraticSum<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn rho(&self) -> T {
        T::lit(2.0) * self.sigma * self.sigma
    }
    fn lower_bound(&self) -> Option<T> {
        Some(T::zero())
    }
    fn value(&self, x: &Array1<T>) -> T {
        x.iter()
            .fold(T::zero(), |acc, &v| acc + clipped_quadratic(v, self.sigma))
    }
    fn subgradient(&self, x: &Array1<T>) -> Array1<T> {
        x.mapv(|v| clipped_quadratic_subgrad(v, self.sigma))
    }
}
