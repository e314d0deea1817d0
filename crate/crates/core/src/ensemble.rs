//! Hard majority voting over independently trained members.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{self, ModelKind, ModelSpec, Prediction, TrainedModel};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Side whose supporters sit further from 0.5 on average; CAD if equal.
    Confidence,
    Fixed(u8),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VotingEnsemble {
    pub members: Vec<TrainedModel>,
    pub tie_break: TieBreak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteOutcome {
    pub label: u8,
    /// Mean member probability; reported only, never decides the label.
    pub p_positive: f64,
    pub per_member: Vec<(ModelKind, Prediction)>,
    pub tied: bool,
}

/// Trains every member on all of `d`, member `i` reseeded with
/// `derive_seed(seed, i)`.
pub fn train_voting(d: &Dataset, specs: &[ModelSpec], tie_break: TieBreak, seed: u64) -> Result<VotingEnsemble> {
    if specs.len() < 2 {
        return Err(Error::Config("ensemble requires ≥ 2 members".into()));
    }
    if let TieBreak::Fixed(l) = tie_break {
        if l > 1 {
            return Err(Error::Config(format!("fixed tie-break label must be 0 or 1, got {l}")));
        }
    }
    let members = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            classifiers::train(d, &spec.with_seed(derive_seed(seed, i as u64))).map_err(|e| Error::Member {
                index: i,
                kind: spec.kind().to_string(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VotingEnsemble { members, tie_break })
}

/// Label decided by hard votes; returns `(label, tied)`.
pub fn combine(votes: &[Prediction], tie_break: TieBreak) -> (u8, bool) {
    let ones = votes.iter().filter(|v| v.label == 1).count();
    let zeros = votes.len() - ones;
    if ones != zeros {
        return (u8::from(ones > zeros), false);
    }
    let label = match tie_break {
        TieBreak::Fixed(l) => l,
        TieBreak::Confidence => {
            let confidence = |l: u8| {
                let d: Vec<f64> = votes.iter().filter(|v| v.label == l).map(|v| (v.p_positive - 0.5).abs()).collect();
                d.iter().sum::<f64>() / d.len() as f64
            };
            if confidence(0) > confidence(1) {
                0
            } else {
                1
            }
        }
    };
    (label, true)
}

impl VotingEnsemble {
    /// Vote on a row in the members' shared feature order.
    pub fn vote(&self, row: &[f64]) -> VoteOutcome {
        self.vote_scaled(row)
    }

    pub(crate) fn vote_scaled(&self, x: &[f64]) -> VoteOutcome {
        let per_member: Vec<(ModelKind, Prediction)> =
            self.members.iter().map(|m| (m.kind(), m.predict_row(x))).collect();
        let preds: Vec<Prediction> = per_member.iter().map(|(_, p)| *p).collect();
        let (label, tied) = combine(&preds, self.tie_break);
        let p_positive = preds.iter().map(|p| p.p_positive).sum::<f64>() / preds.len() as f64;
        VoteOutcome {
            label,
            p_positive,
            per_member,
            tied,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(label: u8, p_positive: f64) -> Prediction {
        Prediction { label, p_positive }
    }

    #[test]
    fn majority_and_unanimity() {
        assert_eq!(combine(&[p(1, 0.8), p(1, 0.6), p(0, 0.1)], TieBreak::Confidence), (1, false));
        assert_eq!(combine(&[p(0, 0.2), p(0, 0.4), p(0, 0.1)], TieBreak::Confidence), (0, false));
    }

    #[test]
    fn confidence_tie_break() {
        assert_eq!(combine(&[p(1, 0.9), p(0, 0.6)], TieBreak::Confidence), (1, true));
        assert_eq!(combine(&[p(1, 0.55), p(0, 0.05)], TieBreak::Confidence), (0, true));
        assert_eq!(combine(&[p(1, 0.75), p(0, 0.25)], TieBreak::Confidence), (1, true));
    }

    #[test]
    fn fixed_tie_break() {
        assert_eq!(combine(&[p(1, 0.99), p(0, 0.49)], TieBreak::Fixed(0)), (0, true));
    }
}
