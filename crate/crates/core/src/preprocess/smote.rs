use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, PatientRecord};
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoteTarget {
    /// Grow the minority class to exactly the majority count.
    Balance,
    /// Emit `percentage / 100 × minority count` synthetic records.
    Percentage(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
    pub target: SmoteTarget,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k_neighbors: 5,
            target: SmoteTarget::Balance,
            seed: 0,
        }
    }
}

/// Synthetic minority oversampling.
///
/// Parents are visited round-robin over a seeded shuffle of the minority
/// class; each synthetic point interpolates numeric features at one uniform
/// position on the segment towards a random one of the parent's `k` nearest
/// minority neighbours, and takes each binary/ordinal value from the parent
/// or the neighbour with probability ½. Neighbours are found by Euclidean
/// distance over z-scored numeric features. Originals are kept in order and
/// synthetic records are appended with `synthetic = true`.
pub fn smote(d: &Dataset, cfg: &SmoteConfig) -> Result<Dataset> {
    let labels = d.labels()?;
    let counts = d.class_counts();
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::SingleClass);
    }
    let minority_label: u8 = if counts[1] < counts[0] { 1 } else { 0 };
    let minority: Vec<usize> = (0..d.len()).filter(|&i| labels[i] == minority_label).collect();
    let m = minority.len();
    if cfg.k_neighbors == 0 || cfg.k_neighbors >= m {
        return Err(Error::Config(format!(
            "SMOTE needs 1 <= k_neighbors < minority size ({m}), got {}",
            cfg.k_neighbors
        )));
    }
    let n_synthetic = match cfg.target {
        SmoteTarget::Balance => counts[usize::from(1 - minority_label)] - m,
        SmoteTarget::Percentage(p) => m * p as usize / 100,
    };

    let numeric: Vec<usize> = (0..d.n_features()).filter(|&j| d.schema.features[j].kind.is_numeric()).collect();
    let scale: Vec<(f64, f64)> = numeric
        .iter()
        .map(|&j| {
            let col = d.column(j);
            let sd = stats::sample_std(&col).filter(|s| *s > 0.0).unwrap_or(1.0);
            (stats::mean(&col), sd)
        })
        .collect();
    let z = |i: usize| -> Vec<f64> {
        numeric
            .iter()
            .zip(&scale)
            .map(|(&j, (mu, sd))| (d.records[i].values[j] - mu) / sd)
            .collect()
    };
    let points: Vec<Vec<f64>> = minority.iter().map(|&i| z(i)).collect();

    // k nearest minority neighbours of each minority point, ties by position
    let neighbours: Vec<Vec<usize>> = (0..m)
        .map(|a| {
            let mut others: Vec<(f64, usize)> = (0..m)
                .filter(|&b| b != a)
                .map(|b| {
                    let dist: f64 = points[a].iter().zip(&points[b]).map(|(x, y)| (x - y) * (x - y)).sum();
                    (dist, b)
                })
                .collect();
            others.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            others.into_iter().take(cfg.k_neighbors).map(|(_, b)| b).collect()
        })
        .collect();

    let mut rng = seeded(cfg.seed);
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng);

    let mut records = d.records.clone();
    records.reserve(n_synthetic);
    for s in 0..n_synthetic {
        let a = order[s % m];
        let b = neighbours[a][rng.random_range(0..cfg.k_neighbors)];
        let parent = &d.records[minority[a]];
        let neighbour = &d.records[minority[b]];
        let u: f64 = rng.random();
        let values = parent
            .values
            .iter()
            .zip(&neighbour.values)
            .zip(&d.schema.features)
            .map(|((&x, &n), spec)| {
                if spec.kind.is_numeric() {
                    x + u * (n - x)
                } else if rng.random_bool(0.5) {
                    n
                } else {
                    x
                }
            })
            .collect();
        records.push(PatientRecord {
            values,
            label: Some(minority_label),
            out_of_range: parent.out_of_range || neighbour.out_of_range,
            synthetic: true,
        });
    }

    let mut out = d.with_records(records);
    out.note(format!(
        "smote k={} target={:?} seed={} minority={} synthetic={}",
        cfg.k_neighbors, cfg.target, cfg.seed, minority_label, n_synthetic
    ));
    Ok(out)
}
