use ndarray::Array1;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use itsdeal::objective::{
    clipped_quadratic, generate_instance, read_instance, rsr_subgrad, rsr_value, write_instance, AbsSum,
    ClippedQuadraticSum, DoubleWell, HalfSquaredNorm, InstanceParams, SignalDistribution, SparseRecoveryInstance,
    WeaklyConvexFn,
};

fn small(seed: u64, lambda_bar: f64) -> SparseRecoveryInstance<f64> {
    generate_instance(InstanceParams {
        n: 50,
        m: 25,
        k1: 5,
        k2: 3,
        sigma: 1.0,
        lambda_bar,
        seed,
        signal: SignalDistribution::StandardNormal,
    })
    .unwrap()
}

fn three_point_violations(f: &dyn WeaklyConvexFn<f64>, scale: f64, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.dim();
    let rho = f.rho();
    let mut bad = 0;
    for _ in 0..10_000 {
        let x: Array1<f64> = (0..n).map(|_| rng.random_range(-scale..=scale)).collect();
        let y: Array1<f64> = (0..n).map(|_| rng.random_range(-scale..=scale)).collect();
        let l: f64 = rng.random_range(0.0..=1.0);
        let lhs = f.value(&(l * &x + (1.0 - l) * &y));
        let d = &x - &y;
        let rhs = l * f.value(&x) + (1.0 - l) * f.value(&y) + rho * l * (1.0 - l) / 2.0 * d.dot(&d);
        if lhs > rhs + 1e-9 * rhs.abs().max(1.0) {
            bad += 1;
        }
    }
    bad
}

#[test]
fn declared_weak_convexity_moduli_hold() {
    assert_eq!(three_point_violations(&HalfSquaredNorm { dim: 3 }, 5.0, 1), 0);
    assert_eq!(three_point_violations(&AbsSum { dim: 4 }, 5.0, 2), 0);
    assert_eq!(three_point_violations(&ClippedQuadraticSum { dim: 4, sigma: 1.5 }, 2.0, 3), 0);
    assert_eq!(three_point_violations(&small(4, 0.7), 2.0, 4), 0);
}

#[test]
fn double_well_is_weakly_convex_only_with_its_modulus() {
    // Σy⁴ − y² has curvature 12y² − 2 ≥ −2
    assert_eq!(three_point_violations(&DoubleWell { dim: 2 }, 1.5, 5), 0);
    struct Understated(DoubleWell);
    impl WeaklyConvexFn<f64> for Understated {
        fn dim(&self) -> usize {
            WeaklyConvexFn::<f64>::dim(&self.0)
        }
        fn rho(&self) -> f64 {
            0.5
        }
        fn lower_bound(&self) -> Option<f64> {
            None
        }
        fn value(&self, x: &Array1<f64>) -> f64 {
            self.0.value(x)
        }
        fn subgradient(&self, x: &Array1<f64>) -> Array1<f64> {
            self.0.subgradient(x)
        }
    }
    assert!(three_point_violations(&Understated(DoubleWell { dim: 2 }), 0.3, 6) > 0);
}

proptest! {
    #[test]
    fn clipped_quadratic_shape(t in -5.0f64..5.0, s in 0.0f64..3.0, sigma in 0.2f64..3.0) {
        prop_assert_eq!(clipped_quadratic(t, sigma), clipped_quadratic(-t, sigma));
        let (a, b) = (t.abs(), t.abs() + s);
        prop_assert!(clipped_quadratic(a, sigma) <= clipped_quadratic(b, sigma) + 1e-15);
        if a > 0.0 {
            prop_assert!(clipped_quadratic(b, sigma) / b <= clipped_quadratic(a, sigma) / a + 1e-12);
        }
        prop_assert!(clipped_quadratic(t, sigma) <= 1.0);
    }
}

#[test]
fn rsr_is_coercive_along_random_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..5 {
        let inst = small(seed, 0.1);
        let at_zero = rsr_value(&inst, &Array1::zeros(50)).unwrap();
        for _ in 0..20 {
            let d: Array1<f64> = (0..50).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let x = &d * (1e3 / d.dot(&d).sqrt());
            assert!(rsr_value(&inst, &x).unwrap() > at_zero);
        }
    }
}

#[test]
fn rsr_subgradient_matches_finite_differences() {
    let inst = small(11, 0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let x: Array1<f64> = (0..50).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let g = rsr_subgrad(&inst, &x).unwrap();
        let h = 1e-7;
        let fd: Array1<f64> = (0..50)
            .map(|i| {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                (rsr_value(&inst, &xp).unwrap() - rsr_value(&inst, &xm).unwrap()) / (2.0 * h)
            })
            .collect();
        let err = (&g - &fd).mapv(|v| v * v).sum().sqrt() / g.dot(&g).sqrt();
        assert!(err < 1e-5, "relative error {err}");
    }
}

#[test]
fn sensing_matrix_entries_have_variance_one_over_m() {
    let inst = generate_instance::<f64>(InstanceParams { n: 400, m: 200, ..InstanceParams::full_scale(3) }).unwrap();
    let count = inst.a.len() as f64;
    let mean = inst.a.sum() / count;
    let var = inst.a.mapv(|v| (v - mean) * (v - mean)).sum() / count;
    assert!(mean.abs() < 3.0 / (200.0 * count).sqrt());
    assert!((var * 200.0 - 1.0).abs() < 0.02, "m·var = {}", var * 200.0);
    let col_norms: Vec<f64> = inst.a.columns().into_iter().map(|c| c.dot(&c)).collect();
    let avg = col_norms.iter().sum::<f64>() / col_norms.len() as f64;
    assert!((avg - 1.0).abs() < 0.02);
}

#[test]
fn noise_is_shifted_gaussian() {
    let inst = generate_instance::<f64>(InstanceParams { m: 500, k2: 400, ..InstanceParams::full_scale(8) }).unwrap();
    let nz: Vec<f64> = inst.noise.iter().copied().filter(|v| *v != 0.0).collect();
    let mean = nz.iter().sum::<f64>() / nz.len() as f64;
    assert_eq!(nz.len(), 400);
    assert!((mean - 2.0).abs() < 0.2);
}

#[test]
fn instance_file_round_trip_and_f32_load() {
    let inst = small(21, 0.1);
    let mut buf = Vec::new();
    write_instance(&mut buf, &inst).unwrap();
    let back: SparseRecoveryInstance<f64> = read_instance(buf.as_slice()).unwrap();
    assert_eq!(back, inst);
    let single: SparseRecoveryInstance<f32> = read_instance(buf.as_slice()).unwrap();
    assert!((single.y[0] as f64 - inst.y[0]).abs() < 1e-6);
}
