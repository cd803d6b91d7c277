use std::fmt::Write as _;

use crate::error::{CsfError, Result};

/// A rectangular time series: column 0 is `t`, the rest are named monitor
/// values. Times strictly increase down the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorReport {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl MonitorReport {
    /// `columns` excludes the leading `t`.
    pub fn new(columns: Vec<String>) -> Self {
        let mut all = Vec::with_capacity(columns.len() + 1);
        all.push("t".to_string());
        all.extend(columns);
        Self {
            columns: all,
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, t: f64, values: &[f64]) -> Result<()> {
        if values.len() + 1 != self.columns.len() {
            return Err(CsfError::Precondition(format!(
                "row has {} values, report has {} columns",
                values.len() + 1,
                self.columns.len()
            )));
        }
        if let Some(last) = self.rows.last() {
            if !(t > last[0]) {
                return Err(CsfError::Precondition(format!(
                    "report times must increase: {t} after {}",
                    last[0]
                )));
            }
        }
        let mut row = Vec::with_capacity(self.columns.len());
        row.push(t);
        row.extend_from_slice(values);
        self.rows.push(row);
        Ok(())
    }

    /// Appends every row of `other`, which must share this report's columns.
    pub fn extend(&mut self, other: &MonitorReport) -> Result<()> {
        if other.columns != self.columns {
            return Err(CsfError::Precondition("report columns differ".into()));
        }
        for r in &other.rows {
            self.push(r[0], &r[1..])?;
        }
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    /// Comma-separated text with one header row. Values use the shortest
    /// representation that parses back to the same `f64`.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            for (j, v) in r.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v:?}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |reason: String| CsfError::Parse {
            what: "monitor time series".into(),
            reason,
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        if columns.first().map(String::as_str) != Some("t") {
            return Err(bad("first column must be `t`".into()));
        }
        let mut report = MonitorReport {
            columns,
            rows: Vec::new(),
        };
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
            let vals = line
                .split(',')
                .map(|s| s.parse::<f64>().map_err(|e| bad(format!("row {i}: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            if vals.len() != report.columns.len() {
                return Err(bad(format!("row {i} has {} fields", vals.len())));
            }
            report.push(vals[0], &vals[1..]).map_err(|e| bad(e.to_string()))?;
        }
        Ok(report)
    }
}
