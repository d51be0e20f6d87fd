//! Upper level: descent directions, step-size rules, and the descent drivers
//! running on the inexact envelope oracle.

mod direction;
mod driver;
mod params;
mod report;
mod step;
mod trace;

pub use direction::{check_direction_pair, direction_power, DirectionRule, PowerDirection};
pub use driver::{higda_run, ideals_run, itsdeal_generic_run, pf_higda_run, RunOptions, RunResult};
pub(crate) use driver::{budget_header, nan_row};
pub use params::{EpsSchedule, HomeParams, Scenario};
pub use report::{residual_rate_report, RateReport};
pub use step::{
    higda_step_size, holder_decrease_coef, pf_higda_step_size, ArmijoBacktracking, FixedStep, HolderBacktracking,
    StepContext, StepOutcome, StepRule,
};
pub use trace::{RunStatus, RunTrace, TraceRow, TRACE_COLUMNS};
