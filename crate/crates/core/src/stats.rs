//! Descriptive statistics and Pearson correlation.

use std::io::Write;

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Linear-interpolation quantile (`h = (n - 1) p`) of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile(values: &[f64], p: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, p)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n − 1 denominator); `None` when n < 2.
pub fn sample_std(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub name: String,
    pub count: usize,
    pub mean: f64,
    /// Undefined for a single record.
    pub std: Option<f64>,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn row(&self, name: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["feature", "count", "mean", "std", "min", "25%", "50%", "75%", "max"])?;
        for r in &self.rows {
            w.write_record([
                r.name.clone(),
                r.count.to_string(),
                format!("{:.6}", r.mean),
                r.std.map(|s| format!("{s:.6}")).unwrap_or_else(|| "NA".into()),
                format!("{:.6}", r.min),
                format!("{:.6}", r.q25),
                format!("{:.6}", r.median),
                format!("{:.6}", r.q75),
                format!("{:.6}", r.max),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

fn summary_row(name: &str, values: &[f64]) -> SummaryRow {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    SummaryRow {
        name: name.to_string(),
        count: values.len(),
        mean: mean(&sorted),
        std: sample_std(&sorted),
        min: sorted[0],
        q25: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q75: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    }
}

/// One row per feature plus one for the label (labelled records only).
pub fn summarize(d: &Dataset) -> Result<SummaryTable> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rows: Vec<SummaryRow> = d
        .schema
        .features
        .iter()
        .enumerate()
        .map(|(j, f)| summary_row(&f.name, &d.column(j)))
        .collect();
    let labels: Vec<f64> = d.records.iter().filter_map(|r| r.label).map(f64::from).collect();
    if !labels.is_empty() {
        rows.push(summary_row(&d.schema.label_name, &labels));
    }
    Ok(SummaryTable { rows })
}

/// Pearson coefficient; `None` when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len();
    if n < 2 || b.len() != n {
        return None;
    }
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    /// Row-major; `None` marks an undefined coefficient.
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        self.values[i][j]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for (name, row) in self.names.iter().zip(&self.values) {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(|v| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "NA".into())));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

/// Pearson matrix over all features plus the label.
pub fn correlation_matrix(d: &Dataset) -> Result<CorrelationMatrix> {
    d.require_trainable()?;
    let mut names = d.schema.names();
    names.push(d.schema.label_name.clone());
    let mut columns: Vec<Vec<f64>> = (0..d.n_features()).map(|j| d.column(j)).collect();
    columns.push(d.labels()?.into_iter().map(f64::from).collect());

    let m = columns.len();
    let mut values = vec![vec![None; m]; m];
    for i in 0..m {
        let defined = sample_std(&columns[i]).is_some_and(|s| s > 0.0);
        values[i][i] = defined.then_some(1.0);
        for j in (i + 1)..m {
            let r = pearson(&columns[i], &columns[j]);
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix { names, values })
}
