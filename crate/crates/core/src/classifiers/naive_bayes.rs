use serde::{Deserialize, Serialize};

use super::Samples;
use crate::error::{Error, Result};

const MIN_VARIANCE: f64 = 1e-9;

/// Per-class likelihood of one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Likelihood {
    Gaussian {
        mean: [f64; 2],
        variance: [f64; 2],
    },
    /// Laplace-smoothed value frequencies, with one extra bucket for values
    /// unseen in training: `(count + 1) / (n_c + V + 1)`.
    Frequencies {
        values: Vec<f64>,
        counts: Vec<[f64; 2]>,
        class_totals: [f64; 2],
    },
}

impl Likelihood {
    fn log_density(&self, class: usize, v: f64) -> f64 {
        match self {
            Likelihood::Gaussian { mean, variance } => {
                let var = variance[class];
                -0.5 * (2.0 * std::f64::consts::PI * var).ln() - (v - mean[class]).powi(2) / (2.0 * var)
            }
            Likelihood::Frequencies {
                values,
                counts,
                class_totals,
            } => {
                let c = values.iter().position(|x| *x == v).map_or(0.0, |i| counts[i][class]);
                ((c + 1.0) / (class_totals[class] + values.len() as f64 + 1.0)).ln()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub priors: [f64; 2],
    pub features: Vec<Likelihood>,
}

impl NaiveBayes {
    pub fn probability(&self, x: &[f64]) -> f64 {
        let score = |c: usize| {
            self.priors[c].ln() + self.features.iter().zip(x).map(|(f, &v)| f.log_density(c, v)).sum::<f64>()
        };
        let (s0, s1) = (score(0), score(1));
        // σ(s1 − s0), stable for large gaps
        1.0 / (1.0 + (s0 - s1).exp())
    }
}

pub fn fit_naive_bayes(s: &Samples) -> Result<NaiveBayes> {
    let counts = s.class_counts();
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::SingleClass);
    }
    let n = s.len() as f64;
    let totals = [counts[0] as f64, counts[1] as f64];
    let features = (0..s.n_features())
        .map(|j| {
            if s.kinds[j].is_numeric() {
                let mut mean = [0.0; 2];
                let mut variance = [0.0; 2];
                for c in 0..2 {
                    let col: Vec<f64> = (0..s.len()).filter(|&i| usize::from(s.labels[i]) == c).map(|i| s.rows[i][j]).collect();
                    let m = crate::stats::mean(&col);
                    mean[c] = m;
                    variance[c] = crate::stats::sample_std(&col).map_or(0.0, |sd| sd * sd).max(MIN_VARIANCE);
                }
                Likelihood::Gaussian { mean, variance }
            } else {
                let mut values: Vec<f64> = s.rows.iter().map(|r| r[j]).collect();
                values.sort_by(f64::total_cmp);
                values.dedup();
                let mut table = vec![[0.0; 2]; values.len()];
                for (r, &y) in s.rows.iter().zip(&s.labels) {
                    let k = values.iter().position(|v| *v == r[j]).expect("collected");
                    table[k][usize::from(y)] += 1.0;
                }
                Likelihood::Frequencies {
                    values,
                    counts: table,
                    class_totals: totals,
                }
            }
        })
        .collect();
    Ok(NaiveBayes {
        priors: [totals[0] / n, totals[1] / n],
        features,
    })
}
