use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{stratified_folds, FoldPlan};
use crate::classifiers::{self, ModelSpec};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Ordered hyperparameter axes; cells enumerate with the first axis slowest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub axes: Vec<(String, Vec<String>)>,
}

impl Grid {
    pub fn axis<T: ToString>(mut self, name: &str, values: impl IntoIterator<Item = T>) -> Self {
        self.axes.push((name.to_string(), values.into_iter().map(|v| v.to_string()).collect()));
        self
    }

    /// Parses `name=v1,v2;other=v3`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut g = Grid::default();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, values) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("grid axis `{part}` is not name=v1,v2")))?;
            let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
            if values.is_empty() {
                return Err(Error::Config(format!("grid axis `{name}` has no values")));
            }
            g.axes.push((name.trim().to_string(), values));
        }
        Ok(g)
    }

    pub fn cells(&self) -> Vec<Vec<(String, String)>> {
        let mut cells = vec![Vec::new()];
        for (name, values) in &self.axes {
            cells = cells
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |v| {
                        let mut c = c.clone();
                        c.push((name.clone(), v.clone()));
                        c
                    })
                })
                .collect();
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub assignment: Vec<(String, String)>,
    pub accuracy: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: ModelSpec,
    pub best_accuracy: f64,
    pub cells: Vec<GridCell>,
}

/// Plain k-fold accuracy of `spec` on `d`, without any preprocessing.
pub fn cv_accuracy(d: &Dataset, spec: &ModelSpec, plan: &FoldPlan) -> Result<f64> {
    let labels = d.labels()?;
    let correct = (0..plan.k)
        .map(|t| {
            let (train, test) = plan.split(t);
            let seed = derive_seed(spec.seed().unwrap_or(plan.seed), t as u64);
            let model = classifiers::train(&d.subset(&train), &spec.with_seed(seed))
                .map_err(|e| Error::Fold { fold: t, source: Box::new(e) })?;
            Ok(test
                .iter()
                .filter(|&&i| model.predict_row(&d.records[i].values).label == labels[i])
                .count())
        })
        .sum::<Result<usize>>()?;
    Ok(correct as f64 / d.len() as f64)
}

/// Exhaustive search scored by inner stratified CV accuracy on `d`; the
/// first cell in grid order wins ties.
pub fn grid_search(d: &Dataset, base: &ModelSpec, grid: &Grid, inner_k: usize, seed: u64) -> Result<GridResult> {
    let cells = grid.cells();
    if grid.axes.is_empty() || cells.is_empty() {
        return Err(Error::Config("grid is empty".into()));
    }
    let plan = stratified_folds(d, inner_k, seed)?;
    let scored: Vec<(GridCell, Option<ModelSpec>)> = cells
        .into_par_iter()
        .map(|assignment| {
            let attempt = (|| {
                let mut spec = base.clone();
                for (name, value) in &assignment {
                    spec.set(name, value)?;
                }
                spec.validate()?;
                let acc = cv_accuracy(d, &spec, &plan)?;
                Ok::<_, Error>((spec, acc))
            })();
            match attempt {
                Ok((spec, acc)) => (
                    GridCell {
                        assignment,
                        accuracy: Some(acc),
                        error: None,
                    },
                    Some(spec),
                ),
                Err(e) => (
                    GridCell {
                        assignment,
                        accuracy: None,
                        error: Some(e.to_string()),
                    },
                    None,
                ),
            }
        })
        .collect();

    let mut best: Option<(f64, &ModelSpec)> = None;
    for (cell, spec) in &scored {
        if let (Some(acc), Some(spec)) = (cell.accuracy, spec) {
            if best.is_none_or(|(b, _)| acc > b) {
                best = Some((acc, spec));
            }
        }
    }
    let (best_accuracy, best) = best.ok_or_else(|| {
        let first = scored.iter().find_map(|(c, _)| c.error.clone()).unwrap_or_default();
        Error::Config(format!("every grid cell failed; first error: {first}"))
    })?;
    let best = best.clone();
    Ok(GridResult {
        best,
        best_accuracy,
        cells: scored.into_iter().map(|(c, _)| c).collect(),
    })
}
