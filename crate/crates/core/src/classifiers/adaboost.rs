//! AdaBoost.M1 over shallow trees.

use serde::{Deserialize, Serialize};

use super::tree::{self, DecisionTree, TreeParams};
use super::Samples;
use crate::error::{Error, Result};

/// Lower clamp on the weighted error when computing a round's weight.
const MIN_ERROR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostParams {
    pub n_rounds: usize,
    /// Depth of each weak tree; 1 is a decision stump.
    pub weak_depth: usize,
    pub seed: u64,
}

impl Default for AdaBoostParams {
    fn default() -> Self {
        AdaBoostParams {
            n_rounds: 50,
            weak_depth: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostRound {
    pub alpha: f64,
    pub error: f64,
    pub learner: DecisionTree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoost {
    pub rounds: Vec<BoostRound>,
}

impl AdaBoost {
    /// `F(x) = Σ αₜ (2hₜ(x) − 1)`.
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.rounds
            .iter()
            .map(|r| r.alpha * (2.0 * f64::from(r.learner.label(x)) - 1.0))
            .sum()
    }

    /// Logistic link `σ(2F)`.
    pub fn probability(&self, x: &[f64]) -> f64 {
        1.0 / (1.0 + (-2.0 * self.margin(x)).exp())
    }
}

/// Diagnostics of one boosting run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoostTrace {
    /// Weighted error of each attempted round, including a rejected last one.
    pub errors: Vec<f64>,
    /// Sum of record weights after each reweighting.
    pub weight_sums: Vec<f64>,
    /// Share of weight on misclassified records after each reweighting.
    pub misclassified_mass: Vec<f64>,
    /// The first learner had error ≥ ½ and was kept with α = 1.
    pub weak_start: bool,
    /// A learner fit the weighted data perfectly.
    pub perfect: bool,
}

pub fn fit_adaboost(s: &Samples, p: &AdaBoostParams) -> Result<(AdaBoost, BoostTrace)> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = s.len();
    let weak = TreeParams {
        min_leaf: 1,
        max_depth: Some(p.weak_depth),
        prune: false,
        confidence: 0.25,
    };
    let all: Vec<usize> = (0..n).collect();
    let mut w = vec![1.0 / n as f64; n];
    let mut rounds = Vec::new();
    let mut trace = BoostTrace::default();

    for t in 0..p.n_rounds {
        // scaled to sum n so Laplace leaves see record-sized counts
        let scaled: Vec<f64> = w.iter().map(|x| x * n as f64).collect();
        let learner = tree::grow(s, all.clone(), &scaled, &weak, None);
        let wrong: Vec<bool> = (0..n).map(|i| learner.label(&s.rows[i]) != s.labels[i]).collect();
        let error: f64 = w.iter().zip(&wrong).filter(|(_, &m)| m).map(|(x, _)| x).sum();
        trace.errors.push(error);

        if error >= 0.5 {
            if t == 0 {
                trace.weak_start = true;
                rounds.push(BoostRound {
                    alpha: 1.0,
                    error,
                    learner,
                });
            }
            break;
        }
        let e = error.max(MIN_ERROR);
        let alpha = 0.5 * ((1.0 - e) / e).ln();
        rounds.push(BoostRound { alpha, error, learner });
        if error == 0.0 {
            trace.perfect = true;
            break;
        }

        let (up, down) = (alpha.exp(), (-alpha).exp());
        for (x, &m) in w.iter_mut().zip(&wrong) {
            *x *= if m { up } else { down };
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        trace.weight_sums.push(w.iter().sum());
        trace
            .misclassified_mass
            .push(w.iter().zip(&wrong).filter(|(_, &m)| m).map(|(x, _)| x).sum());
    }
    Ok((AdaBoost { rounds }, trace))
}
