use serde::{Deserialize, Serialize};

use super::roc::{roc_auc, RocPoint};

/// Two-class confusion counts with CAD (label 1) as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn add(&mut self, truth: u8, predicted: u8) {
        match (truth, predicted) {
            (1, 1) => self.tp += 1,
            (0, 1) => self.fp += 1,
            (1, _) => self.fn_ += 1,
            _ => self.tn += 1,
        }
    }
}

/// Tallies `(true label, predicted label)` pairs.
pub fn confusion(pairs: &[(u8, u8)]) -> ConfusionMatrix {
    let mut cm = ConfusionMatrix::default();
    for &(t, p) in pairs {
        cm.add(t, p);
    }
    cm
}

/// Pooled metrics; `None` marks a quantity whose denominator is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub specificity: Option<f64>,
    pub f_measure: Option<f64>,
    pub mcc: Option<f64>,
    pub kappa: Option<f64>,
    pub rmse: Option<f64>,
    pub roc_auc: Option<f64>,
    pub confusion: ConfusionMatrix,
    #[serde(skip)]
    pub roc_points: Vec<RocPoint>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

pub fn accuracy(cm: &ConfusionMatrix) -> Option<f64> {
    ratio((cm.tp + cm.tn) as f64, cm.total() as f64)
}

pub fn recall(cm: &ConfusionMatrix) -> Option<f64> {
    ratio(cm.tp as f64, (cm.tp + cm.fn_) as f64)
}

pub fn specificity(cm: &ConfusionMatrix) -> Option<f64> {
    ratio(cm.tn as f64, (cm.tn + cm.fp) as f64)
}

pub fn precision(cm: &ConfusionMatrix) -> Option<f64> {
    ratio(cm.tp as f64, (cm.tp + cm.fp) as f64)
}

/// Harmonic mean of precision and recall.
pub fn f_measure(cm: &ConfusionMatrix) -> Option<f64> {
    let (p, r) = (precision(cm)?, recall(cm)?);
    ratio(2.0 * p * r, p + r)
}

pub fn mcc(cm: &ConfusionMatrix) -> Option<f64> {
    let (tp, fp, fn_, tn) = (cm.tp as f64, cm.fp as f64, cm.fn_ as f64, cm.tn as f64);
    let den = ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt();
    ratio(tp * tn - fp * fn_, den)
}

/// Cohen's kappa with chance agreement from the marginals.
pub fn kappa(cm: &ConfusionMatrix) -> Option<f64> {
    let n = cm.total() as f64;
    if n == 0.0 {
        return None;
    }
    let (tp, fp, fn_, tn) = (cm.tp as f64, cm.fp as f64, cm.fn_ as f64, cm.tn as f64);
    let po = (tp + tn) / n;
    let pe = ((tp + fp) * (tp + fn_) + (fn_ + tn) * (fp + tn)) / (n * n);
    ratio(po - pe, 1.0 - pe)
}

pub fn rmse(scored: &[(u8, f64)]) -> Option<f64> {
    if scored.is_empty() {
        return None;
    }
    let sse: f64 = scored.iter().map(|&(y, p)| (p - f64::from(y)).powi(2)).sum();
    Some((sse / scored.len() as f64).sqrt())
}

pub fn compute_metrics(cm: &ConfusionMatrix, scored: &[(u8, f64)]) -> MetricsReport {
    let (roc_points, auc) = match roc_auc(scored) {
        Ok((pts, a)) => (pts, Some(a)),
        Err(_) => (Vec::new(), None),
    };
    MetricsReport {
        accuracy: accuracy(cm),
        precision: precision(cm),
        recall: recall(cm),
        specificity: specificity(cm),
        f_measure: f_measure(cm),
        mcc: mcc(cm),
        kappa: kappa(cm),
        rmse: rmse(scored),
        roc_auc: auc,
        confusion: *cm,
        roc_points,
    }
}
