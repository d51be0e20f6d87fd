//! Run budgets measured either in wall-clock seconds or in deterministic
//! "work seconds" derived from the number of objective-oracle calls.

use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClockMode {
    Wall,
    /// Elapsed time is `oracle_calls / evals_per_second`; identical across machines.
    Work { evals_per_second: f64 },
}

impl Default for ClockMode {
    fn default() -> Self {
        ClockMode::Wall
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub max_iters: usize,
    pub time_s: f64,
    pub clock: ClockMode,
}

impl Budget {
    pub fn iterations(max_iters: usize) -> Self {
        Self { max_iters, time_s: f64::INFINITY, clock: ClockMode::Wall }
    }

    pub fn wall(time_s: f64) -> Self {
        Self { max_iters: usize::MAX, time_s, clock: ClockMode::Wall }
    }

    pub fn work(time_s: f64, evals_per_second: f64) -> Self {
        Self { max_iters: usize::MAX, time_s, clock: ClockMode::Work { evals_per_second } }
    }

    pub(crate) fn validate(&self) -> crate::Result<()> {
        if !(self.time_s > 0.0) {
            return Err(crate::Error::InvalidParameter(format!("time budget must be positive, got {}", self.time_s)));
        }
        if let ClockMode::Work { evals_per_second } = self.clock {
            if !(evals_per_second > 0.0 && evals_per_second.is_finite()) {
                return Err(crate::Error::InvalidParameter("evals_per_second must be positive".into()));
            }
        }
        Ok(())
    }
}

pub(crate) struct Stopwatch {
    start: Instant,
    mode: ClockMode,
}

impl Stopwatch {
    pub(crate) fn start(mode: ClockMode) -> Self {
        Self { start: Instant::now(), mode }
    }

    pub(crate) fn elapsed(&self, calls: u64) -> f64 {
        match self.mode {
            ClockMode::Wall => self.start.elapsed().as_secs_f64(),
            ClockMode::Work { evals_per_second } => calls as f64 / evals_per_second,
        }
    }
}
