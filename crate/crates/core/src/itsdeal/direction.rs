use ndarray::Array1;

use crate::linalg::norm;
use crate::Scalar;

/// `d = −‖g‖^ω g`, with `d = 0` when `g = 0`.
pub fn direction_power<T: Scalar>(g: &Array1<T>, omega: T) -> Array1<T> {
    let n = norm(g);
    if n == T::zero() {
        return Array1::zeros(g.len());
    }
    g * (-n.powf(omega))
}

/// Checks `⟨g, d⟩ ≤ −c₁‖g‖^{1+ϑ}` and `‖d‖ ≤ c₂‖g‖^ϑ`, each up to a relative slack of `1e−12`.
pub fn check_direction_pair<T: Scalar>(g: &Array1<T>, d: &Array1<T>, c1: T, c2: T, vartheta: T) -> bool {
    let slack = T::lit(1e-12);
    let gn = norm(g);
    let inner = g.dot(d);
    let rhs_inner = c1 * gn.powf(T::one() + vartheta);
    let rhs_norm = c2 * gn.powf(vartheta);
    inner <= -rhs_inner + slack * rhs_inner && norm(d) <= rhs_norm + slack * rhs_norm
}

/// Rule mapping an inexact gradient to a search direction.
pub trait DirectionRule<T: Scalar>: Sync {
    fn direction(&self, g: &Array1<T>) -> Array1<T>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerDirection<T> {
    pub omega: T,
}

impl<T: Scalar> DirectionRule<T> for PowerDirection<T> {
    fn direction(&self, g: &Array1<T>) -> Array1<T> {
        direction_power(g, self.omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn examples() {
        let z = Array1::<f64>::zeros(3);
        assert_eq!(direction_power(&z, 2.0), z);
        let g = array![3.0_f64, -4.0];
        assert_eq!(direction_power(&g, 0.0), -&g);
        assert_eq!(direction_power(&g, 1.0), array![-15.0, 20.0]);
    }

    #[test]
    fn holder_pair_holds() {
        let g = array![0.3_f64, -0.7, 1.9];
        for &p in &[1.25_f64, 1.5, 2.0] {
            let omega = (3.0 - p) / (p - 1.0);
            let d = direction_power(&g, omega);
            assert!(check_direction_pair(&g, &d, 1.0, 1.0, 2.0 / (p - 1.0)));
        }
        for omega in 0..=5 {
            let d = direction_power(&g, omega as f64);
            assert!(check_direction_pair(&g, &d, 1.0, 1.0, omega as f64 + 1.0));
        }
        assert!(!check_direction_pair(&g, &g, 1.0, 1.0, 1.0));
    }
}
