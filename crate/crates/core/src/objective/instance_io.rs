//! Plain-text instance container.
//!
//! ```text
//! # itsdeal-instance v1
//! # n=<usize>
//! # m=<usize>
//! # k1=<usize>
//! # k2=<usize>
//! # sigma=<f64>
//! # lambda_bar=<f64>
//! # seed=<u64>
//! # signal=<standard-normal|rademacher>
//! A <m> <n>
//! <m lines of n values>
//! y <m>
//! <one line of m values>
//! x_true <n>
//! <one line>
//! noise <m>
//! <one line>
//! ```
//!
//! Values are written with 17 significant digits so `f64` data round-trips exactly.

use std::io::{BufRead, Write};

use ndarray::{Array1, Array2};

use super::rsr::{InstanceParams, SignalDistribution, SparseRecoveryInstance};
use crate::{Error, Result, Scalar};

const MAGIC: &str = "# itsdeal-instance v1";

fn fmt<T: Scalar>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}

fn write_row<W: Write, T: Scalar>(w: &mut W, values: impl Iterator<Item = T>) -> Result<()> {
    let line: Vec<String> = values.map(fmt).collect();
    writeln!(w, "{}", line.join(" "))?;
    Ok(())
}

pub fn write_instance<W: Write, T: Scalar>(w: &mut W, inst: &SparseRecoveryInstance<T>) -> Result<()> {
    write_instance_with_header(w, inst, &[])
}

/// Like [`write_instance`], with additional `# key=value` lines after the
/// standard keys. Readers ignore keys they do not know.
pub fn write_instance_with_header<W: Write, T: Scalar>(
    w: &mut W,
    inst: &SparseRecoveryInstance<T>,
    extra: &[(String, String)],
) -> Result<()> {
    let p = &inst.params;
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "# n={}", p.n)?;
    writeln!(w, "# m={}", p.m)?;
    writeln!(w, "# k1={}", p.k1)?;
    writeln!(w, "# k2={}", p.k2)?;
    writeln!(w, "# sigma={:?}", p.sigma)?;
    writeln!(w, "# lambda_bar={:?}", p.lambda_bar)?;
    writeln!(w, "# seed={}", p.seed)?;
    let signal = match p.signal {
        SignalDistribution::StandardNormal => "standard-normal",
        SignalDistribution::Rademacher => "rademacher",
    };
    writeln!(w, "# signal={signal}")?;
    for (k, v) in extra {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "A {} {}", p.m, p.n)?;
    for row in inst.a.rows() {
        write_row(w, row.iter().copied())?;
    }
    writeln!(w, "y {}", p.m)?;
    write_row(w, inst.y.iter().copied())?;
    writeln!(w, "x_true {}", p.n)?;
    write_row(w, inst.x_true.iter().copied())?;
    writeln!(w, "noise {}", p.m)?;
    write_row(w, inst.noise.iter().copied())?;
    Ok(())
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_values<T: Scalar>(line: &str, expected: usize) -> Result<Vec<T>> {
    let vals = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map(T::lit)
                .map_err(|e| parse_err(format!("bad number {tok:?}: {e}")))
        })
        .collect::<Result<Vec<T>>>()?;
    if vals.len() != expected {
        return Err(parse_err(format!("expected {expected} values, found {}", vals.len())));
    }
    Ok(vals)
}

pub fn read_instance<R: BufRead, T: Scalar>(r: R) -> Result<SparseRecoveryInstance<T>> {
    let mut lines = r.lines();
    let mut next = || -> Result<String> {
        lines
            .next()
            .ok_or_else(|| parse_err("unexpected end of instance file"))?
            .map_err(Error::from)
    };
    if next()?.trim() != MAGIC {
        return Err(parse_err("missing instance header"));
    }
    let mut header = std::collections::HashMap::new();
    let mut line = next()?;
    while let Some(rest) = line.strip_prefix('#') {
        let (k, v) = rest
            .trim()
            .split_once('=')
            .ok_or_else(|| parse_err(format!("malformed header line {line:?}")))?;
        header.insert(k.trim().to_string(), v.trim().to_string());
        line = next()?;
    }
    let get = |k: &str| -> Result<&String> {
        header.get(k).ok_or_else(|| parse_err(format!("missing header key {k}")))
    };
    fn num<V: std::str::FromStr>(s: &str, k: &str) -> Result<V> {
        s.parse().map_err(|_| Error::Parse(format!("bad value for {k}: {s:?}")))
    }
    let params = InstanceParams {
        n: num(get("n")?, "n")?,
        m: num(get("m")?, "m")?,
        k1: num(get("k1")?, "k1")?,
        k2: num(get("k2")?, "k2")?,
        sigma: num(get("sigma")?, "sigma")?,
        lambda_bar: num(get("lambda_bar")?, "lambda_bar")?,
        seed: num(get("seed")?, "seed")?,
        signal: match get("signal")?.as_str() {
            "standard-normal" => SignalDistribution::StandardNormal,
            "rademacher" => SignalDistribution::Rademacher,
            other => return Err(parse_err(format!("unknown signal distribution {other:?}"))),
        },
    };
    let (m, n) = (params.m, params.n);
    if line.trim() != format!("A {m} {n}") {
        return Err(parse_err(format!("expected matrix block 'A {m} {n}', found {line:?}")));
    }
    let mut data = Vec::with_capacity(m * n);
    for _ in 0..m {
        data.extend(parse_values::<T>(&next()?, n)?);
    }
    let a = Array2::from_shape_vec((m, n), data).map_err(|e| parse_err(e.to_string()))?;
    let mut vector = |name: &str, len: usize| -> Result<Array1<T>> {
        let head = next()?;
        if head.trim() != format!("{name} {len}") {
            return Err(parse_err(format!("expected block '{name} {len}', found {head:?}")));
        }
        Ok(Array1::from(parse_values::<T>(&next()?, len)?))
    };
    let y = vector("y", m)?;
    let x_true = vector("x_true", n)?;
    let noise = vector("noise", m)?;
    Ok(SparseRecoveryInstance {
        params,
        a,
        y,
        x_true,
        noise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::generate_instance;

    #[test]
    fn round_trip_is_exact() {
        let params = InstanceParams {
            n: 12,
            m: 7,
            k1: 3,
            k2: 2,
            sigma: 0.75,
            lambda_bar: 0.1,
            seed: 99,
            signal: SignalDistribution::Rademacher,
        };
        let inst = generate_instance::<f64>(params).unwrap();
        let mut buf = Vec::new();
        write_instance(&mut buf, &inst).unwrap();
        let back: SparseRecoveryInstance<f64> = read_instance(buf.as_slice()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn truncated_file_is_an_error() {
        let inst = generate_instance::<f64>(InstanceParams { n: 4, m: 3, k1: 1, k2: 1, ..InstanceParams::full_scale(1) }).unwrap();
        let mut buf = Vec::new();
        write_instance(&mut buf, &inst).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut: String = text.lines().take(12).collect::<Vec<_>>().join("\n");
        assert!(read_instance::<_, f64>(cut.as_bytes()).is_err());
    }
}
