use std::fs;
use std::path::Path;

use ndarray::Array1;

use itsdeal::bench::{
    run_algorithm, run_comparison, sweep_p, trial_seed, AlgorithmSpec, BenchContext, ExperimentSpec, SweepFamily,
};
use itsdeal::clock::{Budget, ClockMode};
use itsdeal::itsdeal::{RunOptions, RunTrace};
use itsdeal::linalg::relative_error;
use itsdeal::objective::generate_instance;

fn tiny(name: &str) -> ExperimentSpec {
    let mut spec = ExperimentSpec::desk(name);
    spec.instance.n = 60;
    spec.instance.m = 30;
    spec.instance.k1 = vec![3, 6];
    spec.instance.k2 = 2;
    spec.trials = 3;
    spec.max_iters = Some(25);
    spec.time_budget_s = 100.0;
    spec.clock = ClockMode::Work { evals_per_second: 1e6 };
    spec
}

fn ctx(out: Option<&Path>) -> BenchContext {
    BenchContext { jobs: 2, out: out.map(Path::to_path_buf), header: Vec::new() }
}

#[test]
fn reordering_the_roster_does_not_change_any_trial() {
    let mut spec = tiny("iso");
    spec.algorithms = vec![
        AlgorithmSpec::Ideals { p: 1.25, omega: None },
        AlgorithmSpec::SgCss { alpha: 0.01 },
        AlgorithmSpec::PfHigda { p: 1.5, scenario: Default::default() },
    ];
    let a = run_comparison(&spec, &ctx(None)).unwrap();
    spec.algorithms.reverse();
    spec.instance.k1.reverse();
    let b = run_comparison(&spec, &ctx(None)).unwrap();
    assert_eq!(a.trials.len(), b.trials.len());
    for t in &a.trials {
        let u = b.trials.iter().find(|u| u.algorithm == t.algorithm && u.k1 == t.k1 && u.trial == t.trial).unwrap();
        assert_eq!(t, u);
        assert_eq!(t.seed, trial_seed(spec.master_seed, t.k1, t.trial));
    }
}

#[test]
fn wall_budget_is_enforced_within_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = tiny("wall");
    spec.instance.k1 = vec![3];
    spec.trials = 2;
    spec.max_iters = None;
    spec.time_budget_s = 0.3;
    spec.clock = ClockMode::Wall;
    run_comparison(&spec, &ctx(Some(dir.path()))).unwrap();
    for alg in &spec.algorithms {
        for t in 0..2 {
            let path = itsdeal::bench::trial_path(dir.path(), &spec, &alg.label(), 3, t);
            let trace = RunTrace::read_csv(std::io::BufReader::new(fs::File::open(path).unwrap())).unwrap();
            let times: Vec<f64> = trace.rows.iter().map(|r| r.wall_time_s).collect();
            let grace = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            assert!(*times.last().unwrap() <= spec.time_budget_s + grace, "{}: {times:?}", alg.label());
        }
    }
}

#[test]
fn final_relative_error_uses_the_shared_metric() {
    let spec = tiny("metric");
    let inst = generate_instance::<f64>(spec.instance.params(6, 77)).unwrap();
    for alg in &spec.algorithms {
        let opts = RunOptions::new(Budget::iterations(20)).with_truth(inst.x_true.clone());
        let res = run_algorithm(alg, &spec.home, &inst, &opts).unwrap();
        let expect = relative_error(&res.x_final, &inst.x_true);
        assert_eq!(res.trace.final_relative_error().unwrap(), expect, "{}", alg.label());
        assert!((relative_error(&Array1::zeros(60), &inst.x_true) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn sweep_picks_lowest_mean_error_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = tiny("sweep");
    spec.instance.k1 = vec![4];
    spec.trials = 2;
    let report = sweep_p(&spec, SweepFamily::Ideals, &[1.25, 1.5], &ctx(Some(dir.path()))).unwrap();
    assert_eq!(report.entries.len(), 12);
    for (p, best) in &report.best {
        let min = report.entries.iter().filter(|e| e.p == *p).map(|e| e.mean_final_error).fold(f64::INFINITY, f64::min);
        let chosen = report.entries.iter().find(|e| e.candidate == *best).unwrap();
        assert_eq!(chosen.mean_final_error, min);
    }
    let text = fs::read_to_string(dir.path().join("sweep/sweep.csv")).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "p,algorithm,mean_final_error,best");
    assert_eq!(body.len(), 13);
    assert_eq!(body.iter().filter(|l| l.ends_with(",1")).count(), 2);
}

#[test]
fn failed_trials_are_listed_in_failures_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = tiny("fail");
    spec.instance.k1 = vec![3];
    spec.trials = 2;
    // the estimated admissibility threshold on this ball is far below γ = 0.9
    spec.algorithms = vec![
        AlgorithmSpec::Higda { p: 1.5, cal_l: None, radius: Some(1.0), gamma_max: Some(2.0) },
        AlgorithmSpec::SgCss { alpha: 0.01 },
    ];
    let out = run_comparison(&spec, &ctx(Some(dir.path()))).unwrap();
    assert_eq!(out.failures().count(), 2);
    let text = fs::read_to_string(dir.path().join("fail/failures.csv")).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "algorithm,k1,trial,seed,status,reason");
    assert_eq!(body.len(), 3);
    assert!(body[1].starts_with("higda-"));
    assert!(dir.path().join("fail/summary.csv").exists());

    spec.algorithms.remove(0);
    run_comparison(&spec, &ctx(Some(dir.path()))).unwrap();
    assert!(!dir.path().join("fail/failures.csv").exists());
}
