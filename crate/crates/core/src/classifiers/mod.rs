//! From-scratch binary classifiers behind one train/predict contract.

mod adaboost;
mod forest;
mod knn;
mod mlp;
mod naive_bayes;
mod spec;
mod tree;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use adaboost::{fit_adaboost, AdaBoost, AdaBoostParams, BoostRound, BoostTrace};
pub use forest::{fit_forest, ForestParams, RandomForest};
pub use knn::{fit_knn, Knn, KnnParams};
pub use mlp::{fit_mlp, Mlp, MlpParams, MlpTrace};
pub use naive_bayes::{fit_naive_bayes, NaiveBayes};
pub use spec::{ModelKind, ModelSpec, VotingParams};
pub use tree::{fit_tree, DecisionTree, Node, Split, TreeParams};

use crate::data::{Dataset, PatientRecord};
use crate::ensemble::{self, VoteOutcome, VotingEnsemble};
use crate::error::{Error, Result};
use crate::preprocess::ScalingParams;
use crate::schema::{FeatureKind, FeatureSchema};

/// Dense training matrix extracted from a labelled dataset.
#[derive(Debug, Clone)]
pub struct Samples {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub kinds: Vec<FeatureKind>,
}

impl Samples {
    pub fn from_dataset(d: &Dataset) -> Result<Self> {
        d.require_trainable()?;
        Ok(Samples {
            rows: d.records.iter().map(|r| r.values.clone()).collect(),
            labels: d.labels()?,
            kinds: d.schema.features.iter().map(|f| f.kind).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.kinds.len()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - ones, ones]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: u8,
    pub p_positive: f64,
}

impl Prediction {
    pub fn from_probability(p: f64) -> Self {
        Prediction {
            label: u8::from(p >= 0.5),
            p_positive: p,
        }
    }
}

/// Kind-specific fitted parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Tree(DecisionTree),
    Forest(RandomForest),
    AdaBoost(AdaBoost),
    Mlp(Mlp),
    NaiveBayes(NaiveBayes),
    Knn(Knn),
    Voting(VotingEnsemble),
}

impl Payload {
    pub fn kind(&self) -> ModelKind {
        match self {
            Payload::Tree(_) => ModelKind::Tree,
            Payload::Forest(_) => ModelKind::Forest,
            Payload::AdaBoost(_) => ModelKind::AdaBoost,
            Payload::Mlp(_) => ModelKind::Mlp,
            Payload::NaiveBayes(_) => ModelKind::NaiveBayes,
            Payload::Knn(_) => ModelKind::Knn,
            Payload::Voting(_) => ModelKind::Voting,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub spec: ModelSpec,
    pub seed: Option<u64>,
    pub train_size: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub payload: Payload,
    /// Feature names accepted by `predict`, in order.
    pub feature_list: Vec<String>,
    /// Schema of `feature_list`, used to range-check raw queries.
    pub schema: FeatureSchema,
    /// Applied to raw inputs before the payload sees them.
    pub scaling: Option<ScalingParams>,
    pub meta: TrainingMeta,
}

/// Named raw-unit input for [`TrainedModel::predict`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Query {
    pub values: BTreeMap<String, f64>,
    pub allow_out_of_range: bool,
}

impl Query {
    pub fn from_record(schema: &FeatureSchema, record: &PatientRecord) -> Self {
        Query {
            values: schema.names().into_iter().zip(record.values.iter().copied()).collect(),
            allow_out_of_range: false,
        }
    }
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        self.payload.kind()
    }

    /// Prediction for a row already ordered as `feature_list`.
    pub fn predict_row(&self, row: &[f64]) -> Prediction {
        match &self.scaling {
            Some(s) => {
                let mut x = row.to_vec();
                s.apply_row(&self.feature_list, &mut x);
                self.predict_scaled(&x)
            }
            None => self.predict_scaled(row),
        }
    }

    /// Prediction once scaling (if any) has been applied.
    pub(crate) fn predict_scaled(&self, x: &[f64]) -> Prediction {
        match &self.payload {
            Payload::Tree(m) => Prediction::from_probability(m.probability(x)),
            Payload::Forest(m) => Prediction::from_probability(m.probability(x)),
            Payload::AdaBoost(m) => Prediction::from_probability(m.probability(x)),
            Payload::Mlp(m) => Prediction::from_probability(m.probability(x)),
            Payload::NaiveBayes(m) => Prediction::from_probability(m.probability(x)),
            Payload::Knn(m) => Prediction::from_probability(m.probability(x)),
            Payload::Voting(e) => {
                let v = e.vote_scaled(x);
                Prediction {
                    label: v.label,
                    p_positive: v.p_positive,
                }
            }
        }
    }

    /// Orders and range-checks a named query.
    pub fn query_row(&self, q: &Query) -> Result<(Vec<f64>, Vec<String>)> {
        let mut row = Vec::with_capacity(self.feature_list.len());
        let mut warnings = Vec::new();
        for spec in &self.schema.features {
            let v = *q.values.get(&spec.name).ok_or_else(|| Error::MissingFeature(spec.name.clone()))?;
            if !spec.range.contains(v) {
                if !q.allow_out_of_range {
                    return Err(Error::OutOfRange {
                        feature: spec.name.clone(),
                        value: v,
                        range: spec.range.to_string(),
                    });
                }
                warnings.push(format!("{} = {v} outside {}", spec.name, spec.range));
            }
            row.push(v);
        }
        Ok((row, warnings))
    }

    pub fn predict(&self, q: &Query) -> Result<Prediction> {
        let (row, _) = self.query_row(q)?;
        Ok(self.predict_row(&row))
    }

    /// Full vote breakdown; `None` unless this is a voting ensemble.
    pub fn vote_row(&self, row: &[f64]) -> Option<VoteOutcome> {
        let Payload::Voting(e) = &self.payload else {
            return None;
        };
        let mut x = row.to_vec();
        if let Some(s) = &self.scaling {
            s.apply_row(&self.feature_list, &mut x);
        }
        Some(e.vote_scaled(&x))
    }
}

/// Trains the model described by `spec` on every record of `d`.
pub fn train(d: &Dataset, spec: &ModelSpec) -> Result<TrainedModel> {
    spec.validate()?;
    let samples = Samples::from_dataset(d)?;
    let mut warnings = Vec::new();
    let payload = match spec {
        ModelSpec::Tree(p) => Payload::Tree(fit_tree(&samples, p)?),
        ModelSpec::Forest(p) => Payload::Forest(fit_forest(&samples, p)?),
        ModelSpec::AdaBoost(p) => {
            let (m, trace) = fit_adaboost(&samples, p)?;
            if trace.weak_start {
                warnings.push("first weak learner was no better than chance".into());
            }
            Payload::AdaBoost(m)
        }
        ModelSpec::Mlp(p) => {
            let (m, trace) = fit_mlp(&samples, p)?;
            if let Some(epoch) = trace.first_increase {
                warnings.push(format!("training loss increased at epoch {epoch}"));
            }
            Payload::Mlp(m)
        }
        ModelSpec::NaiveBayes => Payload::NaiveBayes(fit_naive_bayes(&samples)?),
        ModelSpec::Knn(p) => Payload::Knn(fit_knn(&samples, p)?),
        ModelSpec::Voting(p) => Payload::Voting(ensemble::train_voting(d, &p.members, p.tie_break, p.seed)?),
    };
    Ok(TrainedModel {
        payload,
        feature_list: d.schema.names(),
        schema: d.schema.clone(),
        scaling: None,
        meta: TrainingMeta {
            spec: spec.clone(),
            seed: spec.seed(),
            train_size: d.len(),
            warnings,
        },
    })
}

pub fn train_tree(d: &Dataset, hp: &TreeParams) -> Result<TrainedModel> {
    train(d, &ModelSpec::Tree(hp.clone()))
}

pub fn train_forest(d: &Dataset, hp: &ForestParams) -> Result<TrainedModel> {
    train(d, &ModelSpec::Forest(hp.clone()))
}

pub fn train_adaboost(d: &Dataset, hp: &AdaBoostParams) -> Result<TrainedModel> {
    train(d, &ModelSpec::AdaBoost(hp.clone()))
}

pub fn train_mlp(d: &Dataset, hp: &MlpParams) -> Result<TrainedModel> {
    train(d, &ModelSpec::Mlp(hp.clone()))
}

pub fn train_naive_bayes(d: &Dataset) -> Result<TrainedModel> {
    train(d, &ModelSpec::NaiveBayes)
}

pub fn train_knn(d: &Dataset, hp: &KnnParams) -> Result<TrainedModel> {
    train(d, &ModelSpec::Knn(hp.clone()))
}

/// Per-column mean and standard deviation (1 when constant), for models
/// that normalize their own inputs.
pub(crate) fn column_moments(rows: &[Vec<f64>], n_features: usize) -> Vec<(f64, f64)> {
    (0..n_features)
        .map(|j| {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let mean = crate::stats::mean(&col);
            let sd = crate::stats::sample_std(&col).filter(|s| *s > 0.0).unwrap_or(1.0);
            (mean, sd)
        })
        .collect()
}

/// Prediction for a record whose values follow the model's feature list.
pub fn predict(m: &TrainedModel, r: &PatientRecord) -> Prediction {
    m.predict_row(&r.values)
}
