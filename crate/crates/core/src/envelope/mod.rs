//! Constants and bounds for the high-order Moreau envelope
//! `F(x) = min_y φ(y) + ‖x − y‖^p / (pγ)` and a brute-force envelope oracle.

mod bounds;
mod kappa;
mod oracle;

pub use bounds::{smoothness_constants, tau_lower_bounded, tau_prox_bounded, SmoothnessBounds};
pub use kappa::{kappa, solve_t_hat, t_hat_residual, KappaTable};
pub use oracle::{exact_envelope_minimizers, exact_envelope_oracle, EnvelopePoint, GridSpec};
