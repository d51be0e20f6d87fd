use std::io::Write;

use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessCell {
    pub algorithm: String,
    pub k1: usize,
    pub threshold: f64,
    pub successes: usize,
    pub trials: usize,
}

impl SuccessCell {
    pub fn probability(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

pub(crate) fn write_header_lines<W: Write>(w: &mut W, header: &[(String, String)]) -> Result<()> {
    for (k, v) in header {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

/// Empirical recovery probabilities per `(algorithm, k1, threshold)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuccessTable {
    pub cells: Vec<SuccessCell>,
}

impl SuccessTable {
    pub fn get(&self, algorithm: &str, k1: usize, threshold: f64) -> Option<&SuccessCell> {
        self.cells
            .iter()
            .find(|c| c.algorithm == algorithm && c.k1 == k1 && c.threshold == threshold)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        self.write_csv_with_header(&[], w)
    }

    /// Writes `# key=value` lines before the column row.
    pub fn write_csv_with_header<W: Write>(&self, header: &[(String, String)], mut w: W) -> Result<()> {
        write_header_lines(&mut w, header)?;
        writeln!(w, "algorithm,k1,threshold,successes,trials,probability")?;
        for c in &self.cells {
            writeln!(
                w,
                "{},{},{:e},{},{},{:.16e}",
                c.algorithm,
                c.k1,
                c.threshold,
                c.successes,
                c.trials,
                c.probability()
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("UTF-8")
    }
}
