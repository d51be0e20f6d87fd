//! The piecewise constant `κ(t)` on `(1, 2]` used by the basic inequality
//!
//! ```text
//! ⟨‖a‖^{t−2}a − ‖b‖^{t−2}b, a − b⟩ ≥ κ(t) r^{t−2} ‖a − b‖²   for a, b ∈ B(0; r).
//! ```
//!
//! The three branches are implemented verbatim. They do not join continuously:
//! at `t̂ ≈ 1.3214` the value drops from ≈0.0750 to ≈0.0171, and at `t = 2` it
//! jumps from ≈0.0497 to 1.

use std::sync::OnceLock;

use crate::{Error, Result, Scalar};

const BRACKET_LO: f64 = 1.0 + 1e-6;
const BRACKET_HI: f64 = 2.0;
const BISECTION_TOL: f64 = 1e-12;

static T_HAT: OnceLock<f64> = OnceLock::new();

/// Left side minus right side of the equation defining `t̂`:
/// `t(t−1)/2 − (1 − [1 + (2−√3)t/(t−1)]^{1−t})`.
pub fn t_hat_residual(t: f64) -> f64 {
    let s3 = 3f64.sqrt();
    let inner = 1.0 + (2.0 - s3) * t / (t - 1.0);
    t * (t - 1.0) / 2.0 - (1.0 - inner.powf(1.0 - t))
}

fn bisect_t_hat() -> f64 {
    let (mut lo, mut hi) = (BRACKET_LO, BRACKET_HI);
    let mut f_lo = t_hat_residual(lo);
    debug_assert!(f_lo < 0.0 && t_hat_residual(hi) > 0.0);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = t_hat_residual(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root `t̂` of the defining equation on `(1, 2]`; bisection to `1e-12`, computed once per process.
pub fn solve_t_hat() -> f64 {
    *T_HAT.get_or_init(bisect_t_hat)
}

/// Cached `t̂` in a concrete scalar type, with `κ` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaTable<T> {
    pub t_hat: T,
}

impl<T: Scalar> Default for KappaTable<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> KappaTable<T> {
    pub fn new() -> Self {
        Self {
            t_hat: T::lit(solve_t_hat()),
        }
    }

    pub fn kappa(&self, t: T) -> Result<T> {
        let one = T::one();
        let two = T::lit(2.0);
        if !(t > one && t <= two) {
            return Err(Error::Domain(format!("kappa requires t in (1, 2], got {t}")));
        }
        let s3 = T::lit(3.0).sqrt();
        let lead = (two + s3) / T::lit(16.0);
        Ok(if t == two {
            one
        } else if t <= self.t_hat {
            lead * (t - one)
        } else {
            lead * (one - (T::lit(3.0) - s3).powf(one - t))
        })
    }
}

/// `κ(t)` for `t ∈ (1, 2]`.
pub fn kappa<T: Scalar>(t: T) -> Result<T> {
    KappaTable::<T>::new().kappa(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn t_hat_matches_reported_value() {
        let t = solve_t_hat();
        assert!((t - 1.3214).abs() <= 5e-4, "t_hat = {t}");
        assert!(t_hat_residual(t).abs() <= 1e-10);
        // mpmath, 40 digits: 1.3214141605284277298...
        assert!((t - 1.321_414_160_528_427_7).abs() < 1e-11);
    }

    #[test]
    fn residual_at_two_is_nonzero() {
        assert!(t_hat_residual(2.0).abs() > 0.5);
    }

    #[test]
    fn branch_values() {
        assert_eq!(kappa(2.0f64).unwrap(), 1.0);
        let s3 = 3f64.sqrt();
        assert_relative_eq!(kappa(1.1f64).unwrap(), (2.0 + s3) * 0.1 / 16.0, max_relative = 1e-14);
        assert_relative_eq!(kappa(1.1f64).unwrap(), 0.023325317547305483085, max_relative = 1e-13);
        assert_relative_eq!(kappa(1.9f64).unwrap(), 0.044872695718307916179, max_relative = 1e-13);
        assert_relative_eq!(kappa(1.9f32).unwrap(), 0.044872696f32, max_relative = 1e-5);
    }

    #[test]
    fn discontinuities_are_kept() {
        let table = KappaTable::<f64>::new();
        let left = table.kappa(table.t_hat).unwrap();
        let right = table.kappa(table.t_hat + 1e-9).unwrap();
        assert!(left > 0.0749 && right < 0.0172);
        assert!(table.kappa(2.0 - 1e-12).unwrap() < 0.05);
    }

    #[test]
    fn domain_errors() {
        assert!(kappa(1.0f64).is_err());
        assert!(kappa(2.0001f64).is_err());
        assert!(kappa(f64::NAN).is_err());
    }
}
