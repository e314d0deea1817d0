use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Records with score ≥ threshold are called positive; +∞ at the origin.
    pub threshold: f64,
}

/// ROC curve over distinct scores (descending, ties in one step) and its
/// trapezoidal area.
pub fn roc_auc(scored: &[(u8, f64)]) -> Result<(Vec<RocPoint>, f64)> {
    let pos = scored.iter().filter(|(y, _)| *y == 1).count() as f64;
    let neg = scored.len() as f64 - pos;
    if pos == 0.0 || neg == 0.0 {
        return Err(Error::SingleClass);
    }
    let mut sorted: Vec<(u8, f64)> = scored.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1));

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0.0, 0.0);
    let mut auc = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].1;
        while i < sorted.len() && sorted[i].1 == t {
            if sorted[i].0 == 1 {
                tp += 1.0;
            } else {
                fp += 1.0;
            }
            i += 1;
        }
        let prev = *points.last().expect("origin");
        let p = RocPoint {
            fpr: fp / neg,
            tpr: tp / pos,
            threshold: t,
        };
        auc += (p.fpr - prev.fpr) * (p.tpr + prev.tpr) / 2.0;
        points.push(p);
    }
    Ok((points, auc))
}
