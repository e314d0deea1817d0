use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold id of each record.
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// `(training indices, held-out indices)` of fold `t`, ascending.
    pub fn split(&self, t: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.len()).partition(|&i| self.assignments[i] != t)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &f in &self.assignments {
            s[f] += 1;
        }
        s
    }
}

pub fn stratified_folds(d: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    stratified_folds_for(&d.labels()?, k, seed)
}

/// Shuffles each class with one seeded stream (class 0 first), then deals
/// records to folds round-robin with a counter that carries across classes.
pub fn stratified_folds_for(labels: &[u8], k: usize, seed: u64) -> Result<FoldPlan> {
    let n = labels.len();
    if k < 2 || k > n {
        return Err(Error::Config(format!("fold count {k} not in 2..={n}")));
    }
    let mut rng = seeded(seed);
    let mut assignments = vec![0; n];
    let mut counter = 0;
    for class in [0u8, 1] {
        let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignments[i] = counter % k;
            counter += 1;
        }
    }
    Ok(FoldPlan { k, assignments, seed })
}
