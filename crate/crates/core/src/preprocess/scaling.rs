use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScale {
    pub name: String,
    pub mean: f64,
    pub std: f64,
}

/// Per-numeric-feature z-score parameters.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScalingParams {
    pub features: Vec<FeatureScale>,
}

impl ScalingParams {
    pub fn get(&self, name: &str) -> Option<&FeatureScale> {
        self.features.iter().find(|f| f.name == name)
    }

    /// Standardizes `values` in place; `names` gives the feature of each slot.
    pub fn apply_row(&self, names: &[String], values: &mut [f64]) {
        for (name, v) in names.iter().zip(values.iter_mut()) {
            if let Some(s) = self.get(name) {
                *v = (*v - s.mean) / s.std;
            }
        }
    }
}

/// Mean and sample standard deviation of every numeric feature.
pub fn fit_standardizer(train: &Dataset) -> Result<ScalingParams> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut features = Vec::new();
    for (j, f) in train.schema.features.iter().enumerate() {
        if !f.kind.is_numeric() {
            continue;
        }
        let col = train.column(j);
        let std = stats::sample_std(&col).unwrap_or(0.0);
        if !(std > 0.0) {
            return Err(Error::ZeroVariance(f.name.clone()));
        }
        features.push(FeatureScale {
            name: f.name.clone(),
            mean: stats::mean(&col),
            std,
        });
    }
    Ok(ScalingParams { features })
}

/// Maps each numeric feature to `(x - mean) / std`; other kinds pass through.
pub fn apply_standardizer(p: &ScalingParams, d: &Dataset) -> Result<Dataset> {
    for s in &p.features {
        match d.schema.feature(&s.name) {
            Some(f) if f.kind.is_numeric() => {}
            Some(_) => return Err(Error::SchemaMismatch(format!("`{}` is not numeric", s.name))),
            None => return Err(Error::SchemaMismatch(format!("dataset has no feature `{}`", s.name))),
        }
    }
    let names = d.schema.names();
    let mut out = d.clone();
    for r in &mut out.records {
        p.apply_row(&names, &mut r.values);
    }
    out.note("standardize");
    Ok(out)
}
