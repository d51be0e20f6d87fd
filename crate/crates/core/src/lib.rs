//! Inexact two-level smoothing for weakly convex minimization.
//!
//! A weakly convex `φ` is replaced by its high-order Moreau envelope
//! `F(x) = min_y φ(y) + ‖x − y‖^p / (pγ)`, whose value and gradient are
//! assembled from approximate proximal points. Descent methods (fixed-step,
//! parameter-free Hölder backtracking, Armijo) then run on the envelope.

pub mod baseline;
pub mod bench;
pub mod clock;
pub mod envelope;
mod error;
pub mod itsdeal;
pub mod linalg;
pub mod objective;
pub mod prox;
mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `git describe` of the source tree this library was built from.
pub const GIT_DESCRIBE: &str = env!("ITSDEAL_GIT_DESCRIBE");

/// Double-precision aliases for the generic building blocks.
pub type HomeParamsF64 = itsdeal::HomeParams<f64>;
pub type InnerSolverConfigF64 = prox::InnerSolverConfig<f64>;
pub type InexactOracleF64 = prox::InexactOracle<f64>;
pub type RunResultF64 = itsdeal::RunResult<f64>;
pub type SparseRecoveryInstanceF64 = objective::SparseRecoveryInstance<f64>;

/// Single-precision aliases.
pub type HomeParamsF32 = itsdeal::HomeParams<f32>;
pub type InnerSolverConfigF32 = prox::InnerSolverConfig<f32>;
pub type SparseRecoveryInstanceF32 = objective::SparseRecoveryInstance<f32>;
