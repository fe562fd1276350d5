//! Column-labelled numeric tables and their text formats.

use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// Rows of finite reals under fixed column labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSeries {
    labels: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl DataSeries {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Self {
            labels: labels.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row; `op` names the computation in the non-finite error.
    pub fn push(&mut self, row: Vec<f64>, op: &str) -> Result<()> {
        if row.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.labels.len(),
                got: row.len(),
            });
        }
        if let Some((i, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                op: format!("{op}: column `{}` is {v}", self.labels[i]),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Whitespace-separated plot data with a `#` header, 17 significant
    /// digits per value.
    pub fn to_dat(&self) -> String {
        let mut s = format!("# {}\n", self.labels.join(" "));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(s, "{}", cells.join(" "));
        }
        s
    }

    /// Comma-separated table with a header row, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", self.labels.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn write_dat(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_dat())?)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_csv())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        let mut s = DataSeries::new(["x", "y"]);
        s.push(vec![0.0, 0.1], "t").unwrap();
        s.push(vec![1.0, -2.5], "t").unwrap();
        assert_eq!(
            s.to_dat(),
            "# x y\n0.0000000000000000e0 1.0000000000000001e-1\n1.0000000000000000e0 -2.5000000000000000e0\n"
        );
        assert!(s.to_csv().starts_with("x,y\n0.0000000000000000e0,"));
        assert_eq!(s.column("y").unwrap(), vec![0.1, -2.5]);
        // 17 significant digits round-trip every double
        let v = 0.1f64 + 0.2;
        assert_eq!(format!("{v:.16e}").parse::<f64>().unwrap(), v);
    }

    #[test]
    fn rejects_bad_rows() {
        let mut s = DataSeries::new(["x", "y"]);
        assert!(s.push(vec![1.0], "t").is_err());
        let err = s.push(vec![1.0, f64::NAN], "my_op").unwrap_err().to_string();
        assert!(err.contains("my_op") && err.contains('y'), "{err}");
        assert!(s.push(vec![f64::INFINITY, 0.0], "t").is_err());
    }
}
