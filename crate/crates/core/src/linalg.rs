//! Small vector helpers on top of `ndarray`.

use ndarray::Array1;

use crate::Scalar;

#[inline]
pub fn norm<T: Scalar>(v: &Array1<T>) -> T {
    v.dot(v).sqrt()
}

#[inline]
pub fn dist<T: Scalar>(a: &Array1<T>, b: &Array1<T>) -> T {
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

/// `‖v‖^{q-2} v` with the convention `0/0 = 0`; the gradient of `‖·‖^q / q`.
pub fn power_map<T: Scalar>(v: &Array1<T>, q: T) -> Array1<T> {
    let n = norm(v);
    if n == T::zero() {
        return Array1::zeros(v.len());
    }
    v * n.powf(q - T::lit(2.0))
}

pub fn sign<T: Scalar>(t: T) -> T {
    if t > T::zero() {
        T::one()
    } else if t < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Relative recovery error `‖x − truth‖₂ / ‖truth‖₂`; the single metric shared by every solver.
pub fn relative_error<T: Scalar>(x: &Array1<T>, truth: &Array1<T>) -> T {
    let denom = norm(truth);
    let num = dist(x, truth);
    if denom == T::zero() {
        num
    } else {
        num / denom
    }
}
