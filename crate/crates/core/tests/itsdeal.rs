use ndarray::Array1;

use itsdeal::bench::{higda_cal_l, AlgorithmSpec, HomeSettings};
use itsdeal::clock::Budget;
use itsdeal::envelope::SmoothnessBounds;
use itsdeal::itsdeal::{
    higda_run, higda_step_size, ideals_run, pf_higda_run, EpsSchedule, HomeParams, RunOptions, RunResult, RunStatus,
    Scenario,
};
use itsdeal::objective::{generate_instance, DoubleWell, HalfSquaredNorm, InstanceParams, SignalDistribution};
use itsdeal::prox::{QuadraticProx, SubgradientProx};

fn rsr() -> itsdeal::SparseRecoveryInstanceF64 {
    generate_instance(InstanceParams {
        n: 60,
        m: 30,
        k1: 4,
        k2: 3,
        sigma: 1.0,
        lambda_bar: 1.0,
        seed: 5,
        signal: SignalDistribution::StandardNormal,
    })
    .unwrap()
}

fn steps(res: &RunResult<f64>) -> impl Iterator<Item = &itsdeal::itsdeal::TraceRow> {
    res.trace.rows.iter().filter(|r| r.has_step())
}

fn all_runs() -> Vec<(String, HomeParams<f64>, RunResult<f64>)> {
    let inst = rsr();
    let opts = RunOptions::new(Budget::iterations(60));
    let mut out = Vec::new();
    for p in [1.25, 1.5, 2.0] {
        let hp = HomeParams::reference_defaults(p);
        let oracle = SubgradientProx { p, gamma: hp.gamma, mu: hp.mu, inner: hp.inner };
        let x0 = Array1::zeros(60);
        for scenario in [Scenario::S1, Scenario::S2, Scenario::S3] {
            let hp = HomeParams { scenario, ..hp };
            out.push((format!("pf-higda p={p} {scenario:?}"), hp, pf_higda_run(&inst, &oracle, &hp, &x0, &opts).unwrap()));
        }
        let ip = hp.with_omega(HomeParams::armijo_omega(p));
        out.push((format!("ideals p={p}"), ip, ideals_run(&inst, &oracle, &ip, &x0, &opts).unwrap()));

        let quad = HalfSquaredNorm { dim: 3 };
        let qo = QuadraticProx::new(p, hp.gamma);
        let x0 = Array1::from(vec![2.0, -1.0, 0.5]);
        out.push((format!("pf-higda quad p={p}"), hp, pf_higda_run(&quad, &qo, &hp, &x0, &opts).unwrap()));
    }
    out
}

#[test]
fn every_step_has_a_valid_direction_and_accepted_line_search() {
    for (name, _, res) in all_runs() {
        assert!(!res.status.is_abort(), "{name}: {:?}", res.status);
        let mut n = 0;
        for row in steps(&res) {
            assert!(row.dir_ok, "{name}: iteration {}", row.iter);
            assert!(row.accept_ok, "{name}: iteration {}", row.iter);
            n += 1;
        }
        assert!(n > 0 || res.status == RunStatus::Converged, "{name} took no steps");
    }
}

#[test]
fn holder_steps_never_exceed_the_cap() {
    for (name, hp, res) in all_runs().into_iter().filter(|(n, _, _)| n.starts_with("pf-higda")) {
        let cap = hp.step_cap();
        for row in steps(&res) {
            assert!(row.step_alpha <= cap * (1.0 + 1e-12), "{name}: α = {} > {cap}", row.step_alpha);
        }
    }
}

#[test]
fn higda_fixed_step_respects_cap_and_descends() {
    let f = HalfSquaredNorm { dim: 2 };
    let home = HomeSettings::default();
    for p in [1.25, 1.5, 2.0] {
        let alg = AlgorithmSpec::Higda { p, cal_l: None, radius: Some(4.0), gamma_max: Some(1.5) };
        alg.validate(&home).unwrap();
        let hp = home.resolve(p, HomeParams::holder_omega(p), Scenario::S3).unwrap();
        let cal_l = higda_cal_l(&alg, &hp, &f).unwrap();
        assert!(cal_l.is_finite() && cal_l > 0.0);
        let alpha = higda_step_size(&hp, cal_l).unwrap();
        assert!(alpha > 0.0 && alpha <= hp.step_cap());

        let x0 = Array1::from(vec![1.5, -2.0]);
        let opts = RunOptions::new(Budget::iterations(200));
        let res = higda_run(&f, &QuadraticProx::new(p, hp.gamma), &hp, &x0, &SmoothnessBounds::from_cal_l_p(cal_l), &opts)
            .unwrap();
        assert!(!res.status.is_abort());
        let rows = &res.trace.rows;
        for row in steps(&res) {
            assert_eq!(row.step_alpha, alpha);
            assert!(row.dir_ok);
        }
        let (first, last) = (rows[0].value_eps, rows.last().unwrap().value_eps);
        assert!(last <= first, "p = {p}");
        // the exponent 2/(p−1) makes the fixed step vanishingly small as p → 1
        if p >= 1.5 {
            assert!(last < first, "p = {p}");
        }
    }
}

#[test]
fn inexactness_budgets_are_summable() {
    let sched = EpsSchedule::<f64>::default();
    let partial: f64 = (0..100_000).map(|k| sched.eps(k)).sum();
    assert!(partial <= sched.total());
    assert!((sched.total() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);

    let f = DoubleWell { dim: 1 };
    let hp = HomeParams::reference_defaults(1.5);
    let hp = HomeParams { gamma: 0.2, ..hp };
    let oracle = SubgradientProx { p: 1.5, gamma: 0.2, mu: hp.mu, inner: hp.inner };
    let res = pf_higda_run(&f, &oracle, &hp, &Array1::from(vec![1.7]), &RunOptions::new(Budget::iterations(300))).unwrap();
    let used: f64 = res.trace.rows.iter().map(|r| r.eps_k).sum();
    assert!(used <= hp.eps.total());
}
