use serde::{Deserialize, Serialize};

use super::{column_moments, Samples};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    /// Odd, so a two-class vote cannot tie.
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

/// Stores the training set; distances use z-scored numeric features and the
/// raw codes of categorical ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
    pub moments: Vec<Option<(f64, f64)>>,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl Knn {
    fn scale(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.moments)
            .map(|(v, m)| m.map_or(*v, |(mu, sd)| (v - mu) / sd))
            .collect()
    }

    /// Indices of the `k` nearest training points; equal distances go to
    /// the lower index.
    pub fn neighbours(&self, x: &[f64]) -> Vec<usize> {
        let q = self.scale(x);
        let mut d: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        d.into_iter().take(self.k).map(|(_, i)| i).collect()
    }

    /// Fraction of the neighbours labelled positive.
    pub fn probability(&self, x: &[f64]) -> f64 {
        let nn = self.neighbours(x);
        nn.iter().filter(|&&i| self.labels[i] == 1).count() as f64 / nn.len() as f64
    }
}

pub fn fit_knn(s: &Samples, p: &KnnParams) -> Result<Knn> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if p.k == 0 || p.k.is_multiple_of(2) || p.k > s.len() {
        return Err(Error::Config(format!("k = {} must be odd and at most {}", p.k, s.len())));
    }
    let moments: Vec<Option<(f64, f64)>> = column_moments(&s.rows, s.n_features())
        .into_iter()
        .zip(&s.kinds)
        .map(|(m, kind)| kind.is_numeric().then_some(m))
        .collect();
    let mut model = Knn {
        k: p.k,
        moments,
        points: Vec::new(),
        labels: s.labels.clone(),
    };
    model.points = s.rows.iter().map(|r| model.scale(r)).collect();
    Ok(model)
}
