//! Radii of balls containing the high-order proximal points and the Hölder
//! constants of the envelope on a ball of radius `r`.

use super::kappa::KappaTable;
use crate::{Error, Result, Scalar};

fn check_p<T: Scalar>(p: T) -> Result<()> {
    if p > T::one() && p <= T::lit(2.0) {
        Ok(())
    } else {
        Err(Error::Domain(format!("p must lie in (1, 2], got {p}")))
    }
}

fn check_positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Prox radius for a function bounded below by `ell0`:
/// `τ̄ = 2r + (2^{p−1} p γ_max (φ(0) − ℓ₀))^{1/p}`.
///
/// `gamma` is only validated (`0 < γ ≤ γ_max`); the radius is uniform over that range.
pub fn tau_lower_bounded<T: Scalar>(
    p: T,
    gamma: T,
    gamma_max: T,
    r: T,
    phi0: T,
    ell0: T,
) -> Result<T> {
    check_p(p)?;
    check_positive("gamma", gamma)?;
    check_positive("gamma_max", gamma_max)?;
    check_positive("r", r)?;
    if gamma > gamma_max {
        return Err(Error::Admissibility(format!(
            "gamma = {gamma} exceeds gamma_max = {gamma_max}"
        )));
    }
    if phi0 < ell0 {
        return Err(Error::Domain(format!(
            "phi(0) = {phi0} is below the declared lower bound {ell0}"
        )));
    }
    let two = T::lit(2.0);
    let gap = two.powf(p - T::one()) * p * gamma_max * (phi0 - ell0);
    Ok(two * r + gap.powf(p.recip()))
}

/// Prox radius under high-order prox-boundedness with threshold estimate `γ̂`:
/// `τ = ((2r^p + pγ(φ(0) − ℓ₀)) / (2^{1−p} − ℓpγ))^{1/p}` with `ℓ = 2^{p−1}/(pγ̂)`.
///
/// `ell0_shifted` is a lower bound of `φ + ℓ‖·‖^p`.
pub fn tau_prox_bounded<T: Scalar>(
    p: T,
    gamma: T,
    gamma_hat: T,
    r: T,
    phi0: T,
    ell0_shifted: T,
) -> Result<T> {
    if !(p > T::one()) {
        return Err(Error::Domain(format!("p must exceed 1, got {p}")));
    }
    check_positive("gamma", gamma)?;
    check_positive("gamma_hat", gamma_hat)?;
    check_positive("r", r)?;
    let one = T::one();
    let two = T::lit(2.0);
    let ell = two.powf(p - one) / (p * gamma_hat);
    let denom = two.powf(one - p) - ell * p * gamma;
    if !(denom > T::zero()) {
        return Err(Error::Admissibility(format!(
            "gamma = {gamma} is not below 4^(1-p)·gamma_hat = {}",
            T::lit(4.0).powf(one - p) * gamma_hat
        )));
    }
    let num = two * r.powf(p) + p * gamma * (phi0 - ell0_shifted);
    if num < T::zero() {
        return Err(Error::Domain(format!(
            "phi(0) = {phi0} is below the shifted lower bound {ell0_shifted}"
        )));
    }
    Ok((num / denom).powf(p.recip()))
}

/// Hölder constants of the prox map and of the envelope gradient on `B(0; r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessBounds<T> {
    pub r: T,
    pub tau: T,
    /// ½-Hölder constant of the prox map.
    pub l_p: T,
    /// `(p−1)/2`-Hölder constant of the envelope gradient.
    pub cal_l_p: T,
    pub gamma_max: T,
    /// Admissibility threshold `min{γ_max, κ_p (r+τ̄)^{p−2} / ρ}`.
    pub sigma: T,
    pub kappa_p: T,
}

impl<T: Scalar> SmoothnessBounds<T> {
    /// Bounds known only through the envelope-gradient constant `𝓛_p`; other fields are `NaN`.
    pub fn from_cal_l_p(cal_l_p: T) -> Self {
        let nan = T::nan();
        Self { r: nan, tau: nan, l_p: nan, cal_l_p, gamma_max: nan, sigma: nan, kappa_p: nan }
    }
}

/// `L_p` and `𝓛_p` on `B(0; r)` for a `ρ`-weakly convex function bounded below,
/// given the prox radius `tau_bar`. Requires `γ < σ = min{γ_max, κ_p (r+τ̄)^{p−2}/ρ}`.
pub fn smoothness_constants<T: Scalar>(
    p: T,
    gamma: T,
    gamma_max: T,
    rho: T,
    r: T,
    tau_bar: T,
) -> Result<SmoothnessBounds<T>> {
    check_p(p)?;
    check_positive("gamma", gamma)?;
    check_positive("r", r)?;
    check_positive("tau", tau_bar)?;
    if rho < T::zero() {
        return Err(Error::Domain(format!("rho must be nonnegative, got {rho}")));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let kappa_p = KappaTable::<T>::new().kappa(p)?;
    let rt = r + tau_bar;
    let curvature = kappa_p * rt.powf(p - two);
    let sigma = if rho > T::zero() {
        gamma_max.min(curvature / rho)
    } else {
        gamma_max
    };
    if gamma >= gamma_max {
        return Err(Error::Admissibility(format!(
            "gamma = {gamma} is not below gamma_max = {gamma_max}"
        )));
    }
    let denom = curvature - rho * gamma;
    if !(denom > T::zero()) {
        return Err(Error::Admissibility(format!(
            "gamma = {gamma} is not below kappa_p (r+tau)^(p-2) / rho = {sigma}"
        )));
    }
    let l_p = ((T::lit(4.0) * curvature * tau_bar + two * rt.powf(p - one)) / denom).sqrt();
    let cal_l_p = two.powf(two - p) / gamma * ((two * r).sqrt() + l_p).powf(p - one);
    Ok(SmoothnessBounds {
        r,
        tau: tau_bar,
        l_p,
        cal_l_p,
        gamma_max,
        sigma,
        kappa_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tau_lower_bounded_examples() {
        assert_relative_eq!(tau_lower_bounded(2.0, 0.5, 1.0, 1.0, 0.0, 0.0).unwrap(), 2.0);
        assert_relative_eq!(
            tau_lower_bounded(2.0, 0.5, 1.0, 1.0, 2.0, 0.0).unwrap(),
            2.0 + 2.0 * 2f64.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(tau_lower_bounded(1.3, 0.1, 0.2, 3.5, -1.0, -1.0).unwrap(), 7.0);
        assert!(matches!(
            tau_lower_bounded(2.0, 0.5, 1.0, 1.0, -1.0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn tau_prox_bounded_examples() {
        let tau = tau_prox_bounded(2.0, 0.1, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(tau, (20.0f64 / 3.0).sqrt(), max_relative = 1e-14);
        // grows without bound as gamma approaches 4^{1-p} gamma_hat = 0.25
        let mut prev = tau;
        for g in [0.2, 0.24, 0.249, 0.2499, 0.24999] {
            let t = tau_prox_bounded(2.0, g, 1.0, 1.0, 0.0, 0.0).unwrap();
            assert!(t > prev);
            prev = t;
        }
        assert!(prev > 100.0);
        assert!(matches!(
            tau_prox_bounded(2.0, 0.25, 1.0, 1.0, 0.0, 0.0),
            Err(Error::Admissibility(_))
        ));
    }

    #[test]
    fn smoothness_constants_p2() {
        let (r, tau, rho, gamma) = (1.0_f64, 2.0_f64, 0.1_f64, 0.5_f64);
        let b = smoothness_constants(2.0, gamma, 1.0, rho, r, tau).unwrap();
        let expected = ((4.0 * tau + 2.0 * (r + tau)) / (1.0 - rho * gamma)).sqrt();
        assert_relative_eq!(b.l_p, expected, max_relative = 1e-14);
        assert_relative_eq!(b.cal_l_p, ((2.0 * r).sqrt() + b.l_p) / gamma, max_relative = 1e-14);
        let b0 = smoothness_constants(2.0, gamma, 1.0, 0.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(b0.l_p, 14f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn cal_l_scales_inversely_with_gamma_at_rho_zero() {
        let a = smoothness_constants(1.5, 0.1, 1.0, 0.0, 1.0, 2.0).unwrap();
        let b = smoothness_constants(1.5, 0.2, 1.0, 0.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(a.l_p, b.l_p);
        assert_relative_eq!(a.cal_l_p, 2.0 * b.cal_l_p, max_relative = 1e-14);
    }

    #[test]
    fn inadmissible_gamma_is_typed_error() {
        // kappa_2 = 1, (r+tau)^0 = 1, so gamma must stay below 1/rho = 0.5
        assert!(matches!(
            smoothness_constants(2.0, 0.6, 1.0, 2.0, 1.0, 2.0),
            Err(Error::Admissibility(_))
        ));
        assert!(matches!(
            smoothness_constants(2.0, 1.0, 1.0, 0.0, 1.0, 2.0),
            Err(Error::Admissibility(_))
        ));
    }
}
