//! Per-node metric tables, normalisation and quartile binning.

use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Divide by the maximum.
    #[default]
    Max,
    /// `(x − min) / (max − min)`.
    MinMax,
}

pub fn normalize(values: &[f64], method: Normalization) -> Result<Vec<f64>> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    match method {
        Normalization::Max => {
            if !(max > 0.0) {
                return Err(Error::invalid(
                    "normalize",
                    "no strictly positive value to scale by",
                ));
            }
            Ok(values.iter().map(|v| v / max).collect())
        }
        Normalization::MinMax => {
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            if !(max > min) {
                return Err(Error::invalid(
                    "normalize",
                    "min-max range is empty (constant values)",
                ));
            }
            Ok(values.iter().map(|v| (v - min) / (max - min)).collect())
        }
    }
}

/// Type-2 sample quantile: the inverse empirical CDF, averaging the two
/// neighbouring order statistics where `n·p` is an integer.
fn quantile_type2(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let np = n as f64 * p;
    let j = np.floor() as usize;
    if (np - j as f64).abs() < 1e-12 && j > 0 && j < n {
        (sorted[j - 1] + sorted[j]) / 2.0
    } else {
        sorted[(np.ceil() as usize).clamp(1, n) - 1]
    }
}

/// The three inner quartile cut points of `values`.
pub fn quartiles(values: &[f64]) -> [f64; 3] {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    [0.25, 0.5, 0.75].map(|p| quantile_type2(&sorted, p))
}

/// Bin `k ∈ 1..=4` holds the values in `(q_{k−1}, q_k]`, with `q_0 = −∞` and
/// `q_4 = +∞`. Equal values always share a bin.
pub fn quartile_bins(values: &[f64]) -> Result<Vec<u8>> {
    if values.len() < 4 {
        return Err(Error::invalid(
            "quartile_bins",
            format!("need at least 4 values, got {}", values.len()),
        ));
    }
    let q = quartiles(values);
    Ok(values
        .iter()
        .map(|&v| 1 + q.iter().filter(|&&cut| v > cut).count() as u8)
        .collect())
}

/// Named per-node columns. Derived columns are stored as ordinary columns
/// named `<metric>_norm` and `<metric>_q`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricTable {
    nodes: Vec<String>,
    columns: Vec<(String, Vec<f64>)>,
}

impl MetricTable {
    pub fn new(nodes: Vec<String>) -> Self {
        MetricTable {
            nodes,
            columns: Vec::new(),
        }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn columns(&self) -> &[(String, Vec<f64>)] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.nodes.len() {
            return Err(Error::DimensionMismatch {
                op: "metric_table",
                expected: self.nodes.len(),
                actual: values.len(),
            });
        }
        self.columns.push((name.into(), values));
        Ok(())
    }

    /// Adds `name`, then `name_norm` when `normalization` is given and
    /// `name_q` when `quartiles` is set.
    pub fn add_metric(
        &mut self,
        name: &str,
        values: Vec<f64>,
        normalization: Option<Normalization>,
        quartiles: bool,
    ) -> Result<()> {
        let norm = normalization.map(|m| normalize(&values, m)).transpose()?;
        let bins = quartiles.then(|| quartile_bins(&values)).transpose()?;
        self.push_column(name, values)?;
        if let Some(norm) = norm {
            self.push_column(format!("{name}_norm"), norm)?;
        }
        if let Some(bins) = bins {
            self.push_column(
                format!("{name}_q"),
                bins.into_iter().map(f64::from).collect(),
            )?;
        }
        Ok(())
    }

    /// CSV with header `node,<col>,…`. Values use the shortest representation
    /// that round-trips; NaN is written as an empty cell.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::from("node");
        for (name, _) in &self.columns {
            buf.push(',');
            buf.push_str(name);
        }
        buf.push('\n');
        for (i, node) in self.nodes.iter().enumerate() {
            buf.push_str(node);
            for (_, vals) in &self.columns {
                buf.push(',');
                if !vals[i].is_nan() {
                    write!(buf, "{}", vals[i]).unwrap();
                }
            }
            buf.push('\n');
        }
        out.write_all(buf.as_bytes())
            .map_err(|e| Error::io("metric csv", e))
    }

    /// Reads a table written by [`MetricTable::write_csv`]; empty cells become NaN.
    pub fn from_csv<R: Read>(reader: R) -> Result<MetricTable> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let csv_err = |e| Error::Csv {
            context: "metric csv".into(),
            source: e,
        };
        let headers = rdr.headers().map_err(csv_err)?.clone();
        if headers.get(0) != Some("node") {
            return Err(Error::invalid("metric csv", "first column must be 'node'"));
        }
        let names: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();
        let mut nodes = Vec::new();
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            nodes.push(rec[0].to_owned());
            for (c, col) in cols.iter_mut().enumerate() {
                let cell = rec.get(c + 1).unwrap_or("");
                let v = if cell.is_empty() {
                    f64::NAN
                } else {
                    cell.parse().map_err(|_| Error::Parse {
                        context: "metric csv".into(),
                        line: k + 2,
                        reason: format!("invalid number '{cell}'"),
                    })?
                };
                col.push(v);
            }
        }
        Ok(MetricTable {
            nodes,
            columns: names.into_iter().zip(cols).collect(),
        })
    }
}
