use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use itsdeal::envelope::{
    exact_envelope_minimizers, exact_envelope_oracle, kappa, smoothness_constants, tau_lower_bounded, GridSpec,
};
use itsdeal::objective::{DoubleWell, HalfSquaredNorm};
use itsdeal::verify::verify_basic_inequality;

#[test]
fn kappa_is_positive_on_the_whole_interval() {
    for i in 1..=2000 {
        let t = 1.0 + i as f64 / 2000.0;
        assert!(kappa(t).unwrap() > 0.0, "kappa({t})");
    }
}

#[test]
fn tau_lower_bounded_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        let p = rng.random_range(1.05..=2.0);
        let gmax = rng.random_range(0.1..=2.0);
        let gamma = gmax * rng.random_range(0.1..=1.0);
        let r = rng.random_range(0.1..=5.0);
        let gap = rng.random_range(0.0..=10.0);
        let base = tau_lower_bounded(p, gamma, gmax, r, gap, 0.0).unwrap();
        let bump = rng.random_range(0.0..=1.0);
        assert!(tau_lower_bounded(p, gamma, gmax, r + bump, gap, 0.0).unwrap() >= base);
        assert!(tau_lower_bounded(p, gamma, gmax + bump, r, gap, 0.0).unwrap() >= base);
        assert!(tau_lower_bounded(p, gamma, gmax, r, gap + bump, 0.0).unwrap() >= base);
    }
}

#[test]
fn double_well_prox_at_origin_is_zero_for_small_gamma() {
    let f = DoubleWell { dim: 1 };
    let x: Array1<f64> = Array1::from(vec![0.0]);
    for p in [1.1, 1.25, 1.5, 1.75, 2.0] {
        let gamma = 1.0 / p;
        let grid = GridSpec::covering(&f, p, gamma, &x).unwrap();
        let mins = exact_envelope_minimizers(&f, p, gamma, &x, &grid, 1e-9).unwrap();
        assert_eq!(mins.len(), 1, "p = {p}");
        assert!(mins[0].argmin[0].abs() < 1e-6, "p = {p}: {}", mins[0].argmin[0]);
    }
}

#[test]
fn double_well_prox_is_set_valued_for_p3() {
    let f = DoubleWell { dim: 1 };
    let x: Array1<f64> = Array1::from(vec![0.0]);
    let mins = exact_envelope_minimizers(&f, 3.0, 0.6, &x, &GridSpec::new(2.0), 1e-9).unwrap();
    assert_eq!(mins.len(), 2);
    let (a, b) = (mins[0].argmin[0], mins[1].argmin[0]);
    assert!((a + b).abs() < 1e-6 && a.abs() > 0.1);
    assert!((mins[0].value - mins[1].value).abs() < 1e-9);
}

#[test]
fn basic_inequality_holds_on_random_pairs() {
    let g = verify_basic_inequality(10_000, 9);
    assert!(g.passed, "{g:?}");
}

#[test]
fn grid_oracle_matches_closed_form_in_two_dimensions() {
    let f = HalfSquaredNorm { dim: 2 };
    let x: Array1<f64> = Array1::from(vec![0.7, -1.1]);
    let pt = exact_envelope_oracle(&f, 2.0, 0.5, &x, &GridSpec::covering(&f, 2.0, 0.5, &x).unwrap()).unwrap();
    // p = 2: prox = x / (1 + γ), envelope = ‖x‖² / (2(1 + γ))
    let expect = x.dot(&x) / 3.0;
    assert!((pt.value - expect).abs() < 1e-8);
    assert!((&pt.argmin - &(&x / 1.5)).mapv(f64::abs).sum() < 1e-5);
}

#[test]
fn smoothness_constants_shrink_with_gamma() {
    let a = smoothness_constants(1.5, 0.02, 1.0, 0.5, 1.0, 3.0).unwrap();
    let b = smoothness_constants(1.5, 0.01, 1.0, 0.5, 1.0, 3.0).unwrap();
    assert!(b.cal_l_p > a.cal_l_p);
    assert!(a.sigma <= a.gamma_max);
}

#[test]
fn gamma_above_sigma_is_rejected() {
    let b = smoothness_constants(1.5, 0.01, 1.0, 0.5, 1.0, 3.0).unwrap();
    let err = smoothness_constants(1.5, b.sigma * 1.01, 1.0, 0.5, 1.0, 3.0).unwrap_err();
    assert!(matches!(err, itsdeal::Error::Admissibility(_)));
}
