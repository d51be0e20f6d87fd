//! Weakly convex objectives: a uniform value/subgradient interface, a small zoo
//! of test functions, and the robust sparse-recovery composite.

mod instance_io;
mod penalty;
mod rsr;
mod zoo;

use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::Array1;

use crate::Scalar;

pub use instance_io::{read_instance, write_instance, write_instance_with_header};
pub use penalty::{clipped_quadratic, clipped_quadratic_subgrad};
pub use rsr::{
    generate_instance, rsr_subgrad, rsr_value, InstanceParams, SignalDistribution,
    SparseRecoveryInstance,
};
pub use zoo::{AbsSum, ClippedQuadraticSum, DoubleWell, HalfSquaredNorm, Zero};

/// A proper function `φ` such that `φ + (ρ/2)‖·‖²` is convex, with an oracle
/// returning one element of the limiting subdifferential.
pub trait WeaklyConvexFn<T: Scalar>: Sync {
    fn dim(&self) -> usize;

    /// Declared weak-convexity modulus `ρ ≥ 0`.
    fn rho(&self) -> T;

    /// A lower bound `ℓ₀ ≤ inf φ`, when known.
    fn lower_bound(&self) -> Option<T>;

    fn value(&self, x: &Array1<T>) -> T;

    fn subgradient(&self, x: &Array1<T>) -> Array1<T>;

    /// Value and subgradient together; override when they share work.
    fn value_and_subgradient(&self, x: &Array1<T>) -> (T, Array1<T>) {
        (self.value(x), self.subgradient(x))
    }
}

impl<T: Scalar, F: WeaklyConvexFn<T> + ?Sized> WeaklyConvexFn<T> for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn rho(&self) -> T {
        (**self).rho()
    }
    fn lower_bound(&self) -> Option<T> {
        (**self).lower_bound()
    }
    fn value(&self, x: &Array1<T>) -> T {
        (**self).value(x)
    }
    fn subgradient(&self, x: &Array1<T>) -> Array1<T> {
        (**self).subgradient(x)
    }
    fn value_and_subgradient(&self, x: &Array1<T>) -> (T, Array1<T>) {
        (**self).value_and_subgradient(x)
    }
}

/// Wrapper counting oracle calls; each value, subgradient, or joint call costs one unit.
pub struct Counted<F> {
    inner: F,
    calls: AtomicU64,
}

impl<F> Counted<F> {
    pub fn new(inner: F) -> Self {
        Self {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }

    fn tick(&self) {
        self.calls.fetch_add(1, Ordering::Relaxed);
    }
}

impl<T: Scalar, F: WeaklyConvexFn<T>> WeaklyConvexFn<T> for Counted<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn rho(&self) -> T {
        self.inner.rho()
    }
    fn lower_bound(&self) -> Option<T> {
        self.inner.lower_bound()
    }
    fn value(&self, x: &Array1<T>) -> T {
        self.tick();
        self.inner.value(x)
    }
    fn subgradient(&self, x: &Array1<T>) -> Array1<T> {
        self.tick();
        self.inner.subgradient(x)
    }
    fn value_and_subgradient(&self, x: &Array1<T>) -> (T, Array1<T>) {
        self.tick();
        self.inner.value_and_subgradient(x)
    }
}
