//! Sparse-recovery experiment harness: seeded instance cells, a worker pool
//! over `(algorithm, k1, trial)` tasks, CSV traces, and success tables.

mod runner;
mod seed;
mod spec;
mod table;

pub use runner::{
    higda_cal_l, run_algorithm, run_algorithm_from, run_comparison, success_probability, sweep_candidates, sweep_p, tabulate, trial_path,
    BenchContext, BenchOutcome, SweepEntry, SweepFamily, SweepReport, TrialOutcome,
};
pub use seed::{splitmix64, trial_seed};
pub use spec::{AlgorithmSpec, ExperimentSpec, HomeSettings, InstanceTemplate, MISSING_CAL_L};
pub use table::{SuccessCell, SuccessTable};
