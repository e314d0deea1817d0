use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{self, DecisionTree, TreeParams};
use super::Samples;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features examined per split; `None` means `⌊√p⌋` (at least 1).
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
    pub tree: TreeParams,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            features_per_split: None,
            bootstrap: true,
            seed: 0,
            tree: TreeParams {
                min_leaf: 1,
                max_depth: None,
                prune: false,
                confidence: 0.25,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Mean of the member trees' leaf probabilities.
    pub fn probability(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.probability(x)).sum::<f64>() / self.trees.len() as f64
    }
}

pub fn fit_forest(s: &Samples, p: &ForestParams) -> Result<RandomForest> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n_feat = s.n_features();
    let m = p.features_per_split.unwrap_or_else(|| ((n_feat as f64).sqrt().floor() as usize).max(1));
    if m == 0 || m > n_feat {
        return Err(Error::Config(format!("features_per_split {m} not in 1..={n_feat}")));
    }
    let weights = vec![1.0; s.len()];
    let trees = (0..p.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded(derive_seed(p.seed, t as u64));
            let idx: Vec<usize> = if p.bootstrap {
                (0..s.len()).map(|_| rng.random_range(0..s.len())).collect()
            } else {
                (0..s.len()).collect()
            };
            tree::grow(s, idx, &weights, &p.tree, Some((m, &mut rng)))
        })
        .collect();
    Ok(RandomForest { trees })
}
