use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{stratified_folds, FoldPlan};
use super::grid::{grid_search, Grid, GridResult};
use super::metrics::{compute_metrics, confusion, MetricsReport};
use crate::classifiers::{self, ModelSpec, Prediction, TrainedModel};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::preprocess::{apply_standardizer, fit_standardizer, smote, ScalingParams, SmoteConfig};
use crate::rng::derive_seed;
use crate::selection::{rank_and_select, Selection};

/// Where preprocessing is fitted relative to cross-validation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// SMOTE, selection and scaling fitted on each training fold only.
    #[default]
    Default,
    /// Fitted once on the whole dataset before folds are drawn.
    Paper,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Mode::Default),
            "paper" => Ok(Mode::Paper),
            other => Err(Error::Config(format!("unknown mode `{other}` (default|paper)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessing {
    pub mode: Mode,
    pub smote: Option<SmoteConfig>,
    /// Keep this many features by gain ratio; `None` keeps all.
    pub selection_k: Option<usize>,
    pub standardize: bool,
}

impl Default for Preprocessing {
    fn default() -> Self {
        Preprocessing {
            mode: Mode::Default,
            smote: Some(SmoteConfig::default()),
            selection_k: Some(12),
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    pub grid: Grid,
    pub inner_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub name: String,
    pub model: ModelSpec,
    pub tuning: Option<Tuning>,
    pub pre: Preprocessing,
}

impl PipelineSpec {
    pub fn new(model: ModelSpec, pre: Preprocessing) -> Self {
        PipelineSpec {
            name: model.kind().display_name().to_string(),
            model,
            tuning: None,
            pre,
        }
    }
}

/// Training data after preprocessing, plus what is needed to treat new rows
/// the same way.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub data: Dataset,
    pub selection: Option<Selection>,
    pub scaling: Option<ScalingParams>,
}

/// SMOTE, then gain-ratio selection, then standardization, all fitted on `d`.
pub fn prepare(d: &Dataset, pre: &Preprocessing, seed: u64) -> Result<Prepared> {
    let mut data = match &pre.smote {
        Some(cfg) => smote(
            d,
            &SmoteConfig {
                seed: derive_seed(cfg.seed, seed),
                ..*cfg
            },
        )?,
        None => d.clone(),
    };
    let mut selection = None;
    if let Some(k) = pre.selection_k {
        if k < data.n_features() {
            let s = rank_and_select(&data, k)?;
            data = data.project(&s.selected())?;
            selection = Some(s);
        }
    }
    let mut scaling = None;
    if pre.standardize {
        let p = fit_standardizer(&data)?;
        data = apply_standardizer(&p, &data)?;
        scaling = Some(p);
    }
    Ok(Prepared {
        data,
        selection,
        scaling,
    })
}

/// Trains on prepared data, tuning first when a grid is given. The returned
/// model accepts raw rows in the prepared feature order.
pub fn fit_pipeline_model(
    prepared: &Prepared,
    model: &ModelSpec,
    tuning: Option<&Tuning>,
    seed: u64,
) -> Result<(TrainedModel, Option<GridResult>)> {
    let (spec, grid) = match tuning {
        Some(t) => {
            let g = grid_search(&prepared.data, model, &t.grid, t.inner_k, seed)?;
            (g.best.clone(), Some(g))
        }
        None => (model.clone(), None),
    };
    let mut m = classifiers::train(&prepared.data, &spec.with_seed(seed))?;
    m.scaling = prepared.scaling.clone();
    Ok((m, grid))
}

/// Full pipeline on all of `d`, for deployment.
pub fn train_pipeline(d: &Dataset, p: &PipelineSpec, seed: u64) -> Result<(TrainedModel, Prepared)> {
    let prepared = prepare(d, &p.pre, seed)?;
    let (m, _) = fit_pipeline_model(&prepared, &p.model, p.tuning.as_ref(), seed)?;
    Ok((m, prepared))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeldOut {
    /// Record index in the cross-validated dataset.
    pub index: usize,
    pub fold: usize,
    pub truth: u8,
    pub prediction: Prediction,
}

#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub report: MetricsReport,
    /// One entry per record, in record order.
    pub held_out: Vec<HeldOut>,
    /// Records that were evaluated (after global preprocessing in paper mode).
    pub evaluated: usize,
}

/// Pooled k-fold evaluation of `p` under `plan`.
///
/// In [`Mode::Default`] every fold prepares its own training portion and
/// held-out rows are only projected onto its selected features. In
/// [`Mode::Paper`] `d` is taken as already globally prepared.
pub fn cross_validate(d: &Dataset, p: &PipelineSpec, plan: &FoldPlan) -> Result<CvOutcome> {
    if plan.len() != d.len() {
        return Err(Error::Config(format!("fold plan covers {} records, dataset has {}", plan.len(), d.len())));
    }
    let labels = d.labels()?;
    let per_fold: Vec<Vec<HeldOut>> = (0..plan.k)
        .into_par_iter()
        .map(|t| {
            let (train, test) = plan.split(t);
            let fold_seed = derive_seed(plan.seed, t as u64);
            let run = || -> Result<Vec<HeldOut>> {
                let train_d = d.subset(&train);
                let prepared = match p.pre.mode {
                    Mode::Default => prepare(&train_d, &p.pre, fold_seed)?,
                    Mode::Paper => Prepared {
                        data: train_d,
                        selection: None,
                        scaling: None,
                    },
                };
                let (model, _) = fit_pipeline_model(&prepared, &p.model, p.tuning.as_ref(), fold_seed)?;
                let cols: Option<Vec<usize>> = prepared.selection.as_ref().map(|s| {
                    s.selected().iter().map(|n| d.schema.index_of(n).expect("selected from schema")).collect()
                });
                Ok(test
                    .iter()
                    .map(|&i| {
                        let raw = &d.records[i].values;
                        let row: Vec<f64> = match &cols {
                            Some(c) => c.iter().map(|&j| raw[j]).collect(),
                            None => raw.clone(),
                        };
                        HeldOut {
                            index: i,
                            fold: t,
                            truth: labels[i],
                            prediction: model.predict_row(&row),
                        }
                    })
                    .collect())
            };
            run().map_err(|e| Error::Fold { fold: t, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;

    let mut held_out: Vec<HeldOut> = per_fold.into_iter().flatten().collect();
    held_out.sort_by_key(|h| h.index);
    let pairs: Vec<(u8, u8)> = held_out.iter().map(|h| (h.truth, h.prediction.label)).collect();
    let scored: Vec<(u8, f64)> = held_out.iter().map(|h| (h.truth, h.prediction.p_positive)).collect();
    Ok(CvOutcome {
        report: compute_metrics(&confusion(&pairs), &scored),
        evaluated: held_out.len(),
        held_out,
    })
}

/// Draws the fold plan (after global preprocessing in paper mode) and
/// cross-validates.
pub fn run_pipeline(d: &Dataset, p: &PipelineSpec, k: usize, seed: u64) -> Result<CvOutcome> {
    match p.pre.mode {
        Mode::Default => cross_validate(d, p, &stratified_folds(d, k, seed)?),
        Mode::Paper => {
            let prepared = prepare(d, &p.pre, seed)?;
            let plan = stratified_folds(&prepared.data, k, seed)?;
            cross_validate(&prepared.data, p, &plan)
        }
    }
}
