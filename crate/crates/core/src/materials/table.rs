use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Piecewise power-law (log-log linear) interpolant over a strictly
/// increasing positive grid.
#[derive(Debug, Clone)]
pub struct LogLogTable {
    x: Vec<f64>,
    y: Vec<f64>,
    log_x: Vec<f64>,
    log_y: Vec<f64>,
}

impl LogLogTable {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::invalid("log-log table needs >= 2 matched points"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("log-log table grid is not strictly increasing"));
        }
        if x.iter().chain(&y).any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("log-log table values must be finite and > 0"));
        }
        let log_x = x.iter().map(|v| v.ln()).collect();
        let log_y = y.iter().map(|v| v.ln()).collect();
        Ok(LogLogTable { x, y, log_x, log_y })
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    /// Interpolated value; `None` outside `[x_min, x_max]`. Exact at nodes.
    pub fn eval(&self, x: f64) -> Option<f64> {
        if !(x >= self.x_min() && x <= self.x_max()) {
            return None;
        }
        // index of first node > x
        let hi = self.x.partition_point(|&v| v <= x);
        if hi > 0 && self.x[hi - 1] == x {
            return Some(self.y[hi - 1]);
        }
        let (i, j) = (hi - 1, hi);
        let f = (x.ln() - self.log_x[i]) / (self.log_x[j] - self.log_x[i]);
        Some((self.log_y[i] + f * (self.log_y[j] - self.log_y[i])).exp())
    }
}

/// Parsed contents of one embedded data CSV: `key=value` pairs from the
/// first `#` line and the numeric rows.
#[derive(Debug, Clone)]
pub struct DataCsv {
    pub header: BTreeMap<String, String>,
    pub rows: Vec<Vec<f64>>,
}

impl DataCsv {
    pub fn parse(source_name: &str, text: &str) -> Result<Self> {
        let mut header = BTreeMap::new();
        let mut rows = Vec::new();
        let mut seen_header = false;
        let mut width = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if !seen_header {
                    seen_header = true;
                    for tok in comment.split_whitespace() {
                        if let Some((k, v)) = tok.split_once('=') {
                            header.insert(k.to_string(), v.to_string());
                        }
                    }
                }
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::table(source_name, format!("line {}: {e}", lineno + 1)))?;
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(Error::table(source_name, format!("line {}: expected {w} columns", lineno + 1)))
                }
                _ => {}
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::table(source_name, "no data rows"));
        }
        if rows.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(Error::table(source_name, "energies not strictly ascending"));
        }
        Ok(DataCsv { header, rows })
    }

    pub fn require(&self, source_name: &str, key: &str) -> Result<&str> {
        self.header
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::table(source_name, format!("header lacks `{key}=`")))
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[i]).collect()
    }

    /// Table built from the rows whose column `i` is positive; used for the
    /// pair column, which is zero below threshold.
    pub fn positive_table(&self, source_name: &str, i: usize) -> Result<Option<LogLogTable>> {
        let (x, y): (Vec<f64>, Vec<f64>) = self.rows.iter().filter(|r| r[i] > 0.0).map(|r| (r[0], r[i])).unzip();
        if x.len() < 2 {
            return Ok(None);
        }
        LogLogTable::new(x, y).map(Some).map_err(|e| Error::table(source_name, e.to_string()))
    }

    pub fn table(&self, source_name: &str, i: usize) -> Result<LogLogTable> {
        LogLogTable::new(self.column(0), self.column(i)).map_err(|e| Error::table(source_name, e.to_string()))
    }
}
