use crate::linalg::sign;
use crate::Scalar;

/// Clipped quadratic penalty: `2σ|t| − σ²t²` on `|t| ≤ 1/σ`, and `1` beyond.
/// Its second derivative is `−2σ²` on the quadratic branch, so it is `2σ²`-weakly convex.
pub fn clipped_quadratic<T: Scalar>(t: T, sigma: T) -> T {
    let a = t.abs();
    if a <= sigma.recip() {
        T::lit(2.0) * sigma * a - sigma * sigma * t * t
    } else {
        T::one()
    }
}

/// Element of the subdifferential of [`clipped_quadratic`]; `0` is chosen at `t = 0`
/// and on the flat branch (including the breakpoint `|t| = 1/σ`).
pub fn clipped_quadratic_subgrad<T: Scalar>(t: T, sigma: T) -> T {
    let a = t.abs();
    if t == T::zero() || a >= sigma.recip() {
        T::zero()
    } else {
        T::lit(2.0) * sigma * sign(t) - T::lit(2.0) * sigma * sigma * t
    }
}
