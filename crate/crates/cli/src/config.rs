//! TOML configuration, flag overrides, and the `config.<dotted.key>=<value>`
//! header encoding.

use std::path::PathBuf;

use itsdeal::bench::{AlgorithmSpec, ExperimentSpec, HomeSettings, InstanceTemplate, SweepFamily};
use itsdeal::clock::ClockMode;
use itsdeal::itsdeal::Scenario;
use serde::{Deserialize, Serialize};

/// Prefix of header keys that carry the resolved configuration.
pub const HEADER_PREFIX: &str = "config.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Master seed: instance seed for `solve`/`gen-instance`, sub-seed root for `bench`.
    pub seed: u64,
    pub home: HomeSettings,
    pub instance: InstanceTemplate,
    pub solve: SolveConfig,
    pub bench: BenchConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0,
            home: HomeSettings::default(),
            instance: InstanceTemplate::default(),
            solve: SolveConfig::default(),
            bench: BenchConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    /// Robust sparse recovery on a generated or loaded instance.
    #[default]
    Rsr,
    /// `½‖y‖²`.
    Quadratic,
    /// `Σ yᵢ⁴ − yᵢ²`.
    DoubleWell,
    /// `Σ |yᵢ|`.
    AbsSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub algorithm: AlgorithmSpec,
    pub problem: Problem,
    /// Signal sparsity of the generated instance.
    pub k1: usize,
    /// Instance file to load instead of generating one.
    pub instance_file: Option<PathBuf>,
    /// Dimension of the synthetic problems.
    pub dim: usize,
    /// Every coordinate of `x⁰` takes this value unless `x0_file` is set.
    pub x0_fill: f64,
    /// Whitespace-separated starting point.
    pub x0_file: Option<PathBuf>,
    pub budget_s: f64,
    pub max_iters: Option<usize>,
    pub clock: ClockMode,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            algorithm: AlgorithmSpec::PfHigda { p: 1.25, scenario: Scenario::S3 },
            problem: Problem::Rsr,
            k1: 50,
            instance_file: None,
            dim: 1,
            x0_fill: 0.0,
            x0_file: None,
            budget_s: 20.0,
            max_iters: None,
            clock: ClockMode::Wall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BenchMode {
    #[default]
    Compare,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub family: SweepFamily,
    pub p: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { family: SweepFamily::Ideals, p: vec![1.25, 1.5, 1.75, 2.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub name: String,
    pub mode: BenchMode,
    pub algorithms: Vec<AlgorithmSpec>,
    pub budget_s: f64,
    pub max_iters: Option<usize>,
    pub clock: ClockMode,
    pub trials: usize,
    pub thresholds: Vec<f64>,
    pub sweep: SweepConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            name: "bench".into(),
            mode: BenchMode::Compare,
            algorithms: vec![
                AlgorithmSpec::SgDss { alpha0: 0.95 },
                AlgorithmSpec::SgCss { alpha: 0.01 },
                AlgorithmSpec::PfHigda { p: 1.25, scenario: Scenario::S3 },
                AlgorithmSpec::Ideals { p: 1.25, omega: None },
            ],
            budget_s: 20.0,
            max_iters: None,
            clock: ClockMode::Wall,
            trials: 100,
            thresholds: vec![1e-2, 1e-3],
            sweep: SweepConfig::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: Option<&std::path::Path>) -> Result<Self, String> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
                Self::from_toml(&text).map_err(|e| format!("{}: {e}", p.display()))
            }
        }
    }

    pub fn experiment(&self) -> ExperimentSpec {
        ExperimentSpec {
            name: self.bench.name.clone(),
            instance: self.instance.clone(),
            algorithms: self.bench.algorithms.clone(),
            time_budget_s: self.bench.budget_s,
            max_iters: self.bench.max_iters,
            clock: self.bench.clock,
            trials: self.bench.trials,
            thresholds: self.bench.thresholds.clone(),
            master_seed: self.seed,
            home: self.home,
        }
    }

    /// One `config.<dotted.key>` entry per leaf; arrays stay inline.
    pub fn header(&self) -> Vec<(String, String)> {
        let value = toml::Value::try_from(self).expect("configuration serializes to TOML");
        let mut out = Vec::new();
        flatten(HEADER_PREFIX.trim_end_matches('.'), &value, &mut out);
        out
    }

    /// Rebuilds a configuration from header entries; keys without the
    /// `config.` prefix are ignored.
    pub fn from_header<'a, I>(entries: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut root = toml::Table::new();
        for (key, raw) in entries {
            let Some(path) = key.strip_prefix(HEADER_PREFIX) else { continue };
            let parsed: toml::Table =
                toml::from_str(&format!("v = {raw}")).map_err(|e| format!("bad header value for {key}: {e}"))?;
            let value = parsed.get("v").cloned().ok_or_else(|| format!("empty header value for {key}"))?;
            insert(&mut root, path, value)?;
        }
        toml::Value::Table(root).try_into().map_err(|e: toml::de::Error| e.to_string())
    }
}

fn flatten(prefix: &str, v: &toml::Value, out: &mut Vec<(String, String)>) {
    match v {
        toml::Value::Table(t) => {
            for (k, child) in t {
                flatten(&format!("{prefix}.{k}"), child, out);
            }
        }
        leaf => out.push((prefix.to_string(), leaf.to_string())),
    }
}

fn insert(root: &mut toml::Table, path: &str, value: toml::Value) -> Result<(), String> {
    let mut parts = path.split('.').peekable();
    let mut table = root;
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            table.insert(part.to_string(), value);
            return Ok(());
        }
        table = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| format!("header key {path} conflicts with a scalar"))?;
    }
    Err("empty header key".into())
}

/// Algorithm families selectable with `--alg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AlgName {
    SgDss,
    SgCss,
    PfHigda,
    Ideals,
    Higda,
}

/// Algorithm-related flag overrides.
#[derive(Debug, Clone, Default)]
pub struct AlgOverrides {
    pub alg: Option<AlgName>,
    pub p: Option<f64>,
    pub omega: Option<f64>,
    pub scenario: Option<Scenario>,
    pub cal_l: Option<f64>,
    pub alpha: Option<f64>,
}

fn current_p(a: &AlgorithmSpec) -> Option<f64> {
    match *a {
        AlgorithmSpec::PfHigda { p, .. } | AlgorithmSpec::Ideals { p, .. } | AlgorithmSpec::Higda { p, .. } => Some(p),
        AlgorithmSpec::SgDss { .. } | AlgorithmSpec::SgCss { .. } => None,
    }
}

fn name_of(a: &AlgorithmSpec) -> AlgName {
    match a {
        AlgorithmSpec::SgDss { .. } => AlgName::SgDss,
        AlgorithmSpec::SgCss { .. } => AlgName::SgCss,
        AlgorithmSpec::PfHigda { .. } => AlgName::PfHigda,
        AlgorithmSpec::Ideals { .. } => AlgName::Ideals,
        AlgorithmSpec::Higda { .. } => AlgName::Higda,
    }
}

impl AlgOverrides {
    /// Applies the flags to `base`. Switching family keeps `p` where both have one.
    pub fn apply(&self, base: AlgorithmSpec) -> Result<AlgorithmSpec, String> {
        let mut a = match self.alg {
            Some(name) if name != name_of(&base) => {
                let p = current_p(&base).unwrap_or(1.25);
                match name {
                    AlgName::SgDss => AlgorithmSpec::SgDss { alpha0: 0.95 },
                    AlgName::SgCss => AlgorithmSpec::SgCss { alpha: 0.01 },
                    AlgName::PfHigda => AlgorithmSpec::PfHigda { p, scenario: Scenario::S3 },
                    AlgName::Ideals => AlgorithmSpec::Ideals { p, omega: None },
                    AlgName::Higda => AlgorithmSpec::Higda { p, cal_l: None, radius: None, gamma_max: None },
                }
            }
            _ => base,
        };
        let reject = |flag: &str, a: &AlgorithmSpec| Err(format!("--{flag} does not apply to {}", a.label()));
        if let Some(new_p) = self.p {
            match &mut a {
                AlgorithmSpec::PfHigda { p, .. } | AlgorithmSpec::Ideals { p, .. } | AlgorithmSpec::Higda { p, .. } => {
                    *p = new_p
                }
                other => return reject("p", other),
            }
        }
        if let Some(w) = self.omega {
            match &mut a {
                AlgorithmSpec::Ideals { omega, .. } => *omega = Some(w),
                other => return reject("omega", other),
            }
        }
        if let Some(s) = self.scenario {
            match &mut a {
                AlgorithmSpec::PfHigda { scenario, .. } => *scenario = s,
                other => return reject("scenario", other),
            }
        }
        if let Some(l) = self.cal_l {
            match &mut a {
                AlgorithmSpec::Higda { cal_l, .. } => *cal_l = Some(l),
                other => return reject("cal-l", other),
            }
        }
        if let Some(step) = self.alpha {
            match &mut a {
                AlgorithmSpec::SgDss { alpha0 } => *alpha0 = step,
                AlgorithmSpec::SgCss { alpha } => *alpha = step,
                other => return reject("alpha", other),
            }
        }
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_header_round_trips() {
        let c = Config::default();
        let h = c.header();
        assert!(h.iter().any(|(k, v)| k == "config.home.gamma" && v == "0.9"));
        let back = Config::from_header(h.iter().map(|(k, v)| (k.as_str(), v.as_str()))).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::from_toml("seed = 1\nbogus = 2").is_err());
        assert!(Config::from_toml("[home]\ngama = 0.5").is_err());
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = Config::from_toml("[instance]\nn = 200\n[solve.algorithm]\nalg = \"ideals\"\np = 1.5\n").unwrap();
        assert_eq!(c.instance.n, 200);
        assert_eq!(c.instance.m, 500);
        assert_eq!(c.solve.algorithm, AlgorithmSpec::Ideals { p: 1.5, omega: None });
    }

    #[test]
    fn overrides_switch_family_and_keep_p() {
        let o = AlgOverrides { alg: Some(AlgName::Ideals), omega: Some(2.0), ..Default::default() };
        let a = o.apply(AlgorithmSpec::PfHigda { p: 1.5, scenario: Scenario::S1 }).unwrap();
        assert_eq!(a, AlgorithmSpec::Ideals { p: 1.5, omega: Some(2.0) });
        let bad = AlgOverrides { scenario: Some(Scenario::S2), ..Default::default() };
        assert!(bad.apply(a).is_err());
    }
}
