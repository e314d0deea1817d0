use std::io::Write;

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::stats::quantile_sorted;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureOutliers {
    pub feature: String,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    /// Outside the outlier band but inside the extreme band.
    pub outlier_count: usize,
    pub extreme_count: usize,
    pub outlier_rows: Vec<usize>,
    pub extreme_rows: Vec<usize>,
}

/// Advisory IQR report over the numeric features; nothing is removed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierReport {
    pub record_count: usize,
    pub features: Vec<FeatureOutliers>,
}

impl OutlierReport {
    pub fn feature(&self, name: &str) -> Option<&FeatureOutliers> {
        self.features.iter().find(|f| f.feature == name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.record_count.max(1) as f64;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["feature", "q1", "q3", "outlier_pct", "extreme_pct"])?;
        for f in &self.features {
            w.write_record([
                f.feature.clone(),
                format!("{:.4}", f.q1),
                format!("{:.4}", f.q3),
                format!("{:.2}", 100.0 * f.outlier_count as f64 / n),
                format!("{:.2}", 100.0 * f.extreme_count as f64 / n),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

pub fn iqr_flag(d: &Dataset, outlier_factor: f64, extreme_factor: f64) -> Result<OutlierReport> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut features = Vec::new();
    for (j, spec) in d.schema.features.iter().enumerate() {
        if !spec.kind.is_numeric() {
            continue;
        }
        let col = d.column(j);
        let mut sorted = col.clone();
        sorted.sort_by(f64::total_cmp);
        let q1 = quantile_sorted(&sorted, 0.25);
        let q3 = quantile_sorted(&sorted, 0.75);
        let iqr = q3 - q1;
        let mut entry = FeatureOutliers {
            feature: spec.name.clone(),
            q1,
            q3,
            iqr,
            outlier_count: 0,
            extreme_count: 0,
            outlier_rows: Vec::new(),
            extreme_rows: Vec::new(),
        };
        for (i, &v) in col.iter().enumerate() {
            let outside = |f: f64| v < q1 - f * iqr || v > q3 + f * iqr;
            if outside(extreme_factor) {
                entry.extreme_count += 1;
                entry.extreme_rows.push(i);
            } else if outside(outlier_factor) {
                entry.outlier_count += 1;
                entry.outlier_rows.push(i);
            }
        }
        features.push(entry);
    }
    Ok(OutlierReport {
        record_count: d.len(),
        features,
    })
}
