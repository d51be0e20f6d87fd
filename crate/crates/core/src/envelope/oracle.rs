//! Brute-force evaluation of the high-order envelope in dimension one or two.
//!
//! The prox objective `Φ(y) = φ(y) + ‖x − y‖^p / (pγ)` is sampled on a uniform
//! grid over `[−R, R]^d` and the winning cell is refined by ternary search.

use ndarray::Array1;

use crate::linalg::dist;
use crate::objective::WeaklyConvexFn;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    /// Half-width `R` of the sampled box `[−R, R]^d`.
    pub radius: T,
    pub points_per_axis: usize,
    pub refinements: usize,
}

impl<T: Scalar> GridSpec<T> {
    pub const DEFAULT_POINTS: usize = 4001;
    pub const DEFAULT_REFINEMENTS: usize = 60;

    pub fn new(radius: T) -> Self {
        Self {
            radius,
            points_per_axis: Self::DEFAULT_POINTS,
            refinements: Self::DEFAULT_REFINEMENTS,
        }
    }

    /// Grid covering every prox point of `x`: `R = 2r + (2^{p−1} p γ (φ(0) − ℓ₀))^{1/p}`
    /// with `r` slightly above `‖x‖`. Requires a known lower bound.
    pub fn covering<F: WeaklyConvexFn<T> + ?Sized>(f: &F, p: T, gamma: T, x: &Array1<T>) -> Result<Self> {
        let ell0 = f
            .lower_bound()
            .ok_or_else(|| Error::InvalidParameter("covering grid needs a lower bound".into()))?;
        let phi0 = f.value(&Array1::zeros(x.len()));
        let r = x.iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt() + T::lit(1e-3);
        let two = T::lit(2.0);
        let gap = (two.powf(p - T::one()) * p * gamma * (phi0 - ell0)).max(T::zero());
        Ok(Self::new(two * r + gap.powf(p.recip())))
    }

    fn step(&self) -> T {
        T::lit(2.0) * self.radius / T::lit((self.points_per_axis - 1) as f64)
    }

    fn node(&self, i: usize) -> T {
        -self.radius + self.step() * T::lit(i as f64)
    }
}

/// Envelope value at `x` together with the minimizing prox point.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopePoint<T> {
    pub value: T,
    pub argmin: Array1<T>,
}

struct ProxObjective<'a, T, F: ?Sized> {
    f: &'a F,
    x: &'a Array1<T>,
    p: T,
    scale: T,
}

impl<T: Scalar, F: WeaklyConvexFn<T> + ?Sized> ProxObjective<'_, T, F> {
    fn eval(&self, y: &Array1<T>) -> T {
        self.f.value(y) + dist(self.x, y).powf(self.p) * self.scale
    }
}

fn validate<T: Scalar>(dim: usize, x_len: usize, p: T, gamma: T, grid: &GridSpec<T>) -> Result<()> {
    if dim == 0 || dim > 2 {
        return Err(Error::Domain(format!(
            "grid oracle supports dimension 1 or 2, got {dim}"
        )));
    }
    if x_len != dim {
        return Err(Error::Dimension { expected: dim, got: x_len });
    }
    if !(p > T::one()) || !(gamma > T::zero()) {
        return Err(Error::Domain(format!("need p > 1 and gamma > 0, got p={p}, gamma={gamma}")));
    }
    if grid.points_per_axis < 3 || !(grid.radius > T::zero()) {
        return Err(Error::InvalidParameter("grid needs ≥ 3 points and positive radius".into()));
    }
    Ok(())
}

fn ternary<T: Scalar>(mut lo: T, mut hi: T, iters: usize, mut g: impl FnMut(T) -> T) -> (T, T) {
    let three = T::lit(3.0);
    for _ in 0..iters {
        let m1 = lo + (hi - lo) / three;
        let m2 = hi - (hi - lo) / three;
        if g(m1) < g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mid = (lo + hi) / T::lit(2.0);
    (mid, g(mid))
}

/// Sampled objective values on the full grid, row-major for `d = 2`.
fn sample<T: Scalar, F: WeaklyConvexFn<T> + ?Sized>(
    obj: &ProxObjective<'_, T, F>,
    dim: usize,
    grid: &GridSpec<T>,
) -> Vec<T> {
    let n = grid.points_per_axis;
    let mut y = Array1::zeros(dim);
    if dim == 1 {
        (0..n)
            .map(|i| {
                y[0] = grid.node(i);
                obj.eval(&y)
            })
            .collect()
    } else {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            y[0] = grid.node(i);
            for j in 0..n {
                y[1] = grid.node(j);
                out.push(obj.eval(&y));
            }
        }
        out
    }
}

fn refine<T: Scalar, F: WeaklyConvexFn<T> + ?Sized>(
    obj: &ProxObjective<'_, T, F>,
    grid: &GridSpec<T>,
    cell: &[usize],
) -> EnvelopePoint<T> {
    let n = grid.points_per_axis;
    let bounds = |i: usize| (grid.node(i.saturating_sub(1)), grid.node((i + 1).min(n - 1)));
    let iters = grid.refinements;
    let mut y = Array1::zeros(cell.len());
    let grid_point: Array1<T> = cell.iter().map(|&i| grid.node(i)).collect();
    let grid_value = obj.eval(&grid_point);
    let refined = if cell.len() == 1 {
        let (lo, hi) = bounds(cell[0]);
        let (t, v) = ternary(lo, hi, iters, |t| {
            y[0] = t;
            obj.eval(&y)
        });
        (Array1::from(vec![t]), v)
    } else {
        let (lo0, hi0) = bounds(cell[0]);
        let (lo1, hi1) = bounds(cell[1]);
        let inner = |a: T, y: &mut Array1<T>| {
            ternary(lo1, hi1, iters, |b| {
                y[0] = a;
                y[1] = b;
                obj.eval(y)
            })
        };
        let (a, _) = ternary(lo0, hi0, iters, |a| inner(a, &mut y).1);
        let (b, v) = inner(a, &mut y);
        (Array1::from(vec![a, b]), v)
    };
    if refined.1 <= grid_value {
        EnvelopePoint { value: refined.1, argmin: refined.0 }
    } else {
        EnvelopePoint { value: grid_value, argmin: grid_point }
    }
}

/// Brute-force `(min_y Φ(y), argmin)` over the grid, refined in the winning cell.
pub fn exact_envelope_oracle<T: Scalar, F: WeaklyConvexFn<T> + ?Sized>(
    f: &F,
    p: T,
    gamma: T,
    x: &Array1<T>,
    grid: &GridSpec<T>,
) -> Result<EnvelopePoint<T>> {
    let dim = f.dim();
    validate(dim, x.len(), p, gamma, grid)?;
    let obj = ProxObjective { f, x, p, scale: (p * gamma).recip() };
    let vals = sample(&obj, dim, grid);
    let best = vals
        .iter()
        .enumerate()
        .fold((0, T::infinity()), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc })
        .0;
    let n = grid.points_per_axis;
    let cell: Vec<usize> = if dim == 1 { vec![best] } else { vec![best / n, best % n] };
    Ok(refine(&obj, grid, &cell))
}

/// All grid-local minima whose value is within `rel_tol·max(1, |min|)` of the
/// global minimum, each refined; minimizers closer than two grid steps are merged.
pub fn exact_envelope_minimizers<T: Scalar, F: WeaklyConvexFn<T> + ?Sized>(
    f: &F,
    p: T,
    gamma: T,
    x: &Array1<T>,
    grid: &GridSpec<T>,
    rel_tol: T,
) -> Result<Vec<EnvelopePoint<T>>> {
    let dim = f.dim();
    validate(dim, x.len(), p, gamma, grid)?;
    let obj = ProxObjective { f, x, p, scale: (p * gamma).recip() };
    let vals = sample(&obj, dim, grid);
    let n = grid.points_per_axis;
    let global = vals.iter().copied().fold(T::infinity(), T::min);
    let cutoff = global + rel_tol * global.abs().max(T::one());
    let at = |i: isize, j: isize| -> Option<T> {
        if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
            None
        } else if dim == 1 {
            Some(vals[i as usize])
        } else {
            Some(vals[i as usize * n + j as usize])
        }
    };
    let mut cells = Vec::new();
    let rows = n as isize;
    let cols = if dim == 1 { 1 } else { n as isize };
    for i in 0..rows {
        for j in 0..cols {
            let jj = if dim == 1 { 0 } else { j };
            let v = if dim == 1 { vals[i as usize] } else { at(i, jj).unwrap() };
            if v > cutoff {
                continue;
            }
            let neighbours: Vec<(isize, isize)> = if dim == 1 {
                vec![(i - 1, 0), (i + 1, 0)]
            } else {
                (-1..=1)
                    .flat_map(|di| (-1..=1).map(move |dj| (i + di, jj + dj)))
                    .filter(|&(a, b)| (a, b) != (i, jj))
                    .collect()
            };
            let is_local_min = neighbours.iter().all(|&(a, b)| {
                let w = if dim == 1 {
                    if a < 0 || a >= rows { None } else { Some(vals[a as usize]) }
                } else {
                    at(a, b)
                };
                w.is_none_or(|w| v <= w)
            });
            if is_local_min {
                cells.push(if dim == 1 { vec![i as usize] } else { vec![i as usize, jj as usize] });
            }
        }
    }
    let merge_radius = T::lit(2.0) * grid.step();
    let mut out: Vec<EnvelopePoint<T>> = Vec::new();
    for cell in cells {
        let pt = refine(&obj, grid, &cell);
        match out.iter_mut().find(|q| dist(&q.argmin, &pt.argmin) <= merge_radius) {
            Some(q) => {
                if pt.value < q.value {
                    *q = pt;
                }
            }
            None => out.push(pt),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{DoubleWell, HalfSquaredNorm, Zero};
    use ndarray::array;

    #[test]
    fn zero_function_prox_is_identity() {
        let f = Zero { dim: 1 };
        let x = array![0.37_f64];
        let pt = exact_envelope_oracle(&f, 1.5, 0.4, &x, &GridSpec::new(2.0)).unwrap();
        assert!(pt.value.abs() < 1e-12);
        assert!((pt.argmin[0] - 0.37).abs() < 1e-9);
    }

    #[test]
    fn quadratic_p2_closed_form() {
        let f = HalfSquaredNorm { dim: 1 };
        for &(x, gamma) in &[(1.0_f64, 1.0_f64), (-2.3, 0.4), (0.7, 2.5)] {
            let xv = array![x];
            let grid = GridSpec::covering(&f, 2.0, gamma, &xv).unwrap();
            let pt = exact_envelope_oracle(&f, 2.0, gamma, &xv, &grid).unwrap();
            assert!((pt.argmin[0] - x / (1.0 + gamma)).abs() < 1e-7);
            assert!((pt.value - x * x / (2.0 * (1.0 + gamma))).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_two_dimensional() {
        let f = HalfSquaredNorm { dim: 2 };
        let x = array![0.8_f64, -0.4];
        let grid = GridSpec { radius: 2.0, points_per_axis: 401, refinements: 60 };
        let pt = exact_envelope_oracle(&f, 2.0, 1.0, &x, &grid).unwrap();
        assert!((pt.argmin[0] - 0.4).abs() < 1e-6 && (pt.argmin[1] + 0.2).abs() < 1e-6);
        assert!((pt.value - 0.8 / 4.0).abs() < 1e-10);
    }

    #[test]
    fn double_well_p15_unique_minimizer_at_origin() {
        let f = DoubleWell { dim: 1 };
        let x = array![0.0_f64];
        let grid = GridSpec::covering(&f, 1.5, 0.6, &x).unwrap();
        let pt = exact_envelope_oracle(&f, 1.5, 0.6, &x, &grid).unwrap();
        assert!(pt.argmin[0].abs() < 1e-9);
        let mins = exact_envelope_minimizers(&f, 1.5, 0.6, &x, &grid, 1e-9).unwrap();
        assert_eq!(mins.len(), 1);
    }

    #[test]
    fn double_well_p3_has_two_symmetric_minimizers() {
        let f = DoubleWell { dim: 1 };
        let x = array![0.0_f64];
        let grid = GridSpec::new(2.0);
        let mins = exact_envelope_minimizers(&f, 3.0, 0.6, &x, &grid, 1e-9).unwrap();
        assert_eq!(mins.len(), 2, "{mins:?}");
        let (a, b) = (mins[0].argmin[0], mins[1].argmin[0]);
        assert!(a.abs() > 0.1 && (a + b).abs() < 1e-6);
        assert!((mins[0].value - mins[1].value).abs() < 1e-12);
    }

    #[test]
    fn dimension_three_rejected() {
        let f = Zero { dim: 3 };
        let x = Array1::<f64>::zeros(3);
        assert!(matches!(
            exact_envelope_oracle(&f, 1.5, 0.4, &x, &GridSpec::new(1.0)),
            Err(Error::Domain(_))
        ));
    }
}
