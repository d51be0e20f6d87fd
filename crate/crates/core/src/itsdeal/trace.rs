//! Per-iteration run records and their CSV representation.
//!
//! A trace file starts with `# key=value` header lines, followed by one column
//! row and one data row per iterate. Floating-point values carry 17
//! significant digits; flags are written as `0`/`1`; absent values as `NaN`.

use std::io::{BufRead, Write};

use crate::{Error, Result};

pub const TRACE_COLUMNS: [&str; 19] = [
    "iter",
    "wall_time_s",
    "value_eps",
    "grad_eps_norm",
    "eps_k",
    "step_alpha",
    "lbar",
    "inner_iters",
    "backtracks",
    "decrease_coef",
    "dir_inner",
    "dir_norm",
    "dir_ok",
    "accept_ok",
    "decrease_ok",
    "cert_delta",
    "certified",
    "relative_error",
    "objective",
];

/// One row per iterate `x_k`. Step fields describe the move from `x_k` to
/// `x_{k+1}` and are `NaN` on the final row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub wall_time_s: f64,
    pub value_eps: f64,
    pub grad_eps_norm: f64,
    pub eps_k: f64,
    pub step_alpha: f64,
    pub lbar: f64,
    pub inner_iters: usize,
    pub backtracks: usize,
    pub decrease_coef: f64,
    pub dir_inner: f64,
    pub dir_norm: f64,
    pub dir_ok: bool,
    pub accept_ok: bool,
    pub decrease_ok: bool,
    pub cert_delta: f64,
    pub certified: bool,
    pub relative_error: f64,
    pub objective: f64,
}

impl TraceRow {
    pub fn has_step(&self) -> bool {
        !self.step_alpha.is_nan()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    /// Gradient norm at or below the tolerance.
    Converged,
    MaxIterations,
    TimeBudget,
    /// A safety cap was hit; the message names it.
    Aborted(String),
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::MaxIterations => "max-iterations",
            RunStatus::TimeBudget => "time-budget",
            RunStatus::Aborted(_) => "aborted",
        }
    }

    pub fn is_abort(&self) -> bool {
        matches!(self, RunStatus::Aborted(_))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub header: Vec<(String, String)>,
    pub rows: Vec<TraceRow>,
}

fn fmt_f(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn parse_f(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad float {s:?}: {e}")))
}

fn parse_u(s: &str) -> Result<usize> {
    s.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))
}

fn parse_b(s: &str) -> Result<bool> {
    match s.trim() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::Parse(format!("bad flag {other:?}"))),
    }
}

impl RunTrace {
    pub fn push_header(&mut self, key: impl Into<String>, value: impl ToString) {
        self.header.push((key.into(), value.to_string()));
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn final_relative_error(&self) -> Option<f64> {
        self.rows.last().map(|r| r.relative_error).filter(|e| !e.is_nan())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in &self.header {
            if k.contains('=') || k.contains('\n') || v.contains('\n') {
                return Err(Error::InvalidParameter(format!("header entry {k:?} cannot be serialized")));
            }
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{}", TRACE_COLUMNS.join(","))?;
        for r in &self.rows {
            let b = |v: bool| if v { "1" } else { "0" };
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.iter,
                fmt_f(r.wall_time_s),
                fmt_f(r.value_eps),
                fmt_f(r.grad_eps_norm),
                fmt_f(r.eps_k),
                fmt_f(r.step_alpha),
                fmt_f(r.lbar),
                r.inner_iters,
                r.backtracks,
                fmt_f(r.decrease_coef),
                fmt_f(r.dir_inner),
                fmt_f(r.dir_norm),
                b(r.dir_ok),
                b(r.accept_ok),
                b(r.decrease_ok),
                fmt_f(r.cert_delta),
                b(r.certified),
                fmt_f(r.relative_error),
                fmt_f(r.objective),
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("trace output is UTF-8")
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut header = Vec::new();
        let mut body = String::new();
        for line in r.lines() {
            let line = line?;
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("header line without '=': {line:?}")))?;
                header.push((k.to_string(), v.to_string()));
            } else {
                body.push_str(&line);
                body.push('\n');
            }
        }
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let cols = rdr.headers()?.clone();
        if cols.iter().collect::<Vec<_>>() != TRACE_COLUMNS {
            return Err(Error::Parse(format!("unexpected trace columns: {cols:?}")));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let f = |i: usize| parse_f(&rec[i]);
            rows.push(TraceRow {
                iter: parse_u(&rec[0])?,
                wall_time_s: f(1)?,
                value_eps: f(2)?,
                grad_eps_norm: f(3)?,
                eps_k: f(4)?,
                step_alpha: f(5)?,
                lbar: f(6)?,
                inner_iters: parse_u(&rec[7])?,
                backtracks: parse_u(&rec[8])?,
                decrease_coef: f(9)?,
                dir_inner: f(10)?,
                dir_norm: f(11)?,
                dir_ok: parse_b(&rec[12])?,
                accept_ok: parse_b(&rec[13])?,
                decrease_ok: parse_b(&rec[14])?,
                cert_delta: f(15)?,
                certified: parse_b(&rec[16])?,
                relative_error: f(17)?,
                objective: f(18)?,
            });
        }
        Ok(Self { header, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(i: usize) -> TraceRow {
        TraceRow {
            iter: i,
            wall_time_s: 0.1 * i as f64,
            value_eps: 1.0 / 3.0,
            grad_eps_norm: 2.0_f64.sqrt(),
            eps_k: 1.0 / ((i + 1) * (i + 1)) as f64,
            step_alpha: if i == 1 { f64::NAN } else { 0.25 },
            lbar: f64::NAN,
            inner_iters: 17,
            backtracks: 2,
            decrease_coef: 1e-300,
            dir_inner: -3.5,
            dir_norm: 7.0,
            dir_ok: true,
            accept_ok: false,
            decrease_ok: true,
            cert_delta: 1e-3,
            certified: false,
            relative_error: 0.5,
            objective: -1.25e10,
        }
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let mut t = RunTrace::default();
        t.push_header("alg", "ideals");
        t.push_header("config.p", "1.25");
        t.rows = vec![row(0), row(1)];
        let s = t.to_csv_string();
        let back = RunTrace::read_csv(s.as_bytes()).unwrap();
        assert_eq!(back.header, t.header);
        assert_eq!(back.rows.len(), 2);
        assert_eq!(back.rows[0].value_eps, t.rows[0].value_eps);
        assert!(back.rows[0].lbar.is_nan());
        assert!(back.rows[1].step_alpha.is_nan());
        assert_eq!(back.to_csv_string(), s);
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f(0.1), "1.0000000000000001e-1");
        assert_eq!(parse_f(&fmt_f(std::f64::consts::PI)).unwrap(), std::f64::consts::PI);
    }

    #[test]
    fn bad_columns_rejected() {
        assert!(RunTrace::read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
