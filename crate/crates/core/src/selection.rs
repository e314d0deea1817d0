//! Gain-ratio attribute ranking.
//!
//! `GainRatio(A) = IG(A) / H(A)` where `IG(A) = H(class) - Σ_v |S_v|/|S| H(class | v)`
//! and `H(A)` is the entropy of the attribute's own value distribution.
//! Numeric attributes with more distinct values than the bin budget are
//! equal-frequency discretized first.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::schema::FeatureSchema;

pub const DEFAULT_BINS: usize = 10;

/// A probability vector (non-negative, summing to one).
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() || p.iter().any(|x| !(*x >= 0.0)) {
            return Err(Error::Config("distribution entries must be non-negative".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("distribution sums to {total}")));
        }
        Ok(Distribution(p))
    }

    /// Normalizes non-negative (possibly weighted) counts.
    pub fn from_counts(counts: &[f64]) -> Option<Self> {
        let total: f64 = counts.iter().sum();
        (total > 0.0).then(|| Distribution(counts.iter().map(|c| c / total).collect()))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(dist: &Distribution) -> f64 {
    dist.0.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

fn entropy_of_counts(counts: &[f64]) -> f64 {
    Distribution::from_counts(counts).map_or(0.0, |d| entropy(&d))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discretized {
    /// Bin index per input value.
    pub codes: Vec<usize>,
    /// Inclusive upper edge of every bin but the last.
    pub edges: Vec<f64>,
}

impl Discretized {
    pub fn n_bins(&self) -> usize {
        self.edges.len() + 1
    }
}

/// Equal-frequency binning into at most `bins` categories. A value equal to
/// an edge belongs to the lower bin.
pub fn discretize(column: &[f64], bins: usize) -> Discretized {
    assert!(!column.is_empty() && bins > 0, "discretize needs data and at least one bin");
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let max = sorted[n - 1];
    let mut edges: Vec<f64> = Vec::new();
    for i in 1..bins {
        let idx = (i * n).div_ceil(bins).saturating_sub(1);
        let e = sorted[idx];
        if e < max && edges.last().is_none_or(|&last| e > last) {
            edges.push(e);
        }
    }
    let codes = column.iter().map(|&v| edges.partition_point(|&e| e < v)).collect();
    Discretized { codes, edges }
}

/// Information gain, attribute entropy and their ratio for a coded attribute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitScore {
    pub info_gain: f64,
    pub intrinsic_entropy: f64,
}

impl SplitScore {
    /// `None` when the attribute has a single value.
    pub fn ratio(&self) -> Option<f64> {
        (self.intrinsic_entropy > 0.0).then(|| self.info_gain / self.intrinsic_entropy)
    }
}

/// Scores an attribute given as value codes against binary labels, with
/// optional per-record weights.
pub fn score_codes(codes: &[usize], labels: &[u8], weights: Option<&[f64]>) -> SplitScore {
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let n_values = codes.iter().copied().max().map_or(0, |m| m + 1);
    let mut table = vec![[0.0f64; 2]; n_values];
    let mut class = [0.0f64; 2];
    for (i, (&c, &y)) in codes.iter().zip(labels).enumerate() {
        table[c][usize::from(y)] += w(i);
        class[usize::from(y)] += w(i);
    }
    let total = class[0] + class[1];
    if total <= 0.0 {
        return SplitScore {
            info_gain: 0.0,
            intrinsic_entropy: 0.0,
        };
    }
    let value_totals: Vec<f64> = table.iter().map(|r| r[0] + r[1]).collect();
    let conditional: f64 = table
        .iter()
        .zip(&value_totals)
        .filter(|(_, &t)| t > 0.0)
        .map(|(row, &t)| t / total * entropy_of_counts(row))
        .sum();
    SplitScore {
        info_gain: (entropy_of_counts(&class) - conditional).max(0.0),
        intrinsic_entropy: entropy_of_counts(&value_totals),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureScore {
    pub feature: String,
    /// `None` for a constant attribute.
    pub gain_ratio: Option<f64>,
    pub info_gain: f64,
    pub intrinsic_entropy: f64,
}

/// Value codes used for scoring feature `j`.
fn attribute_codes(d: &Dataset, j: usize, bins: usize) -> Vec<usize> {
    let col = d.column(j);
    let mut distinct = col.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if d.schema.features[j].kind.is_numeric() && distinct.len() > bins {
        discretize(&col, bins).codes
    } else {
        col.iter().map(|v| distinct.partition_point(|x| x < v)).collect()
    }
}

pub fn gain_ratio(d: &Dataset, feature: &str) -> Result<FeatureScore> {
    gain_ratio_with_bins(d, feature, DEFAULT_BINS)
}

pub fn gain_ratio_with_bins(d: &Dataset, feature: &str, bins: usize) -> Result<FeatureScore> {
    let j = d.schema.index_of(feature).ok_or_else(|| Error::MissingFeature(feature.to_string()))?;
    d.require_trainable()?;
    let labels = d.labels()?;
    let s = score_codes(&attribute_codes(d, j, bins), &labels, None);
    Ok(FeatureScore {
        feature: feature.to_string(),
        gain_ratio: s.ratio(),
        info_gain: s.info_gain,
        intrinsic_entropy: s.intrinsic_entropy,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// The top-k features, best first.
    pub schema: FeatureSchema,
    /// Every feature, ranked.
    pub ranked: Vec<FeatureScore>,
}

impl Selection {
    pub fn selected(&self) -> Vec<String> {
        self.schema.names()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rank", "feature", "gain_ratio", "info_gain"])?;
        for (i, s) in self.ranked.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                s.feature.clone(),
                s.gain_ratio.map(|g| format!("{g:.6}")).unwrap_or_else(|| "NA".into()),
                format!("{:.6}", s.info_gain),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

/// Ranks features by gain ratio (undefined last), then information gain,
/// then schema order, and keeps the first `k`.
pub fn rank_and_select(d: &Dataset, k: usize) -> Result<Selection> {
    if k == 0 || k > d.n_features() {
        return Err(Error::Config(format!("selection size {k} not in 1..={}", d.n_features())));
    }
    d.require_trainable()?;
    let labels = d.labels()?;
    let mut scored: Vec<(usize, FeatureScore)> = (0..d.n_features())
        .into_par_iter()
        .map(|j| {
            let s = score_codes(&attribute_codes(d, j, DEFAULT_BINS), &labels, None);
            (
                j,
                FeatureScore {
                    feature: d.schema.features[j].name.clone(),
                    gain_ratio: s.ratio(),
                    info_gain: s.info_gain,
                    intrinsic_entropy: s.intrinsic_entropy,
                },
            )
        })
        .collect();
    scored.sort_by(|(ja, a), (jb, b)| {
        let key = |g: Option<f64>| g.unwrap_or(f64::NEG_INFINITY);
        key(b.gain_ratio)
            .total_cmp(&key(a.gain_ratio))
            .then(b.info_gain.total_cmp(&a.info_gain))
            .then(ja.cmp(jb))
    });
    let ranked: Vec<FeatureScore> = scored.into_iter().map(|(_, s)| s).collect();
    let names: Vec<String> = ranked.iter().take(k).map(|s| s.feature.clone()).collect();
    Ok(Selection {
        schema: d.schema.subset(&names)?,
        ranked,
    })
}

/// Tally of attribute value → class counts; exposed for reports.
pub fn contingency(codes: &[usize], labels: &[u8]) -> BTreeMap<usize, [usize; 2]> {
    let mut t = BTreeMap::new();
    for (&c, &y) in codes.iter().zip(labels) {
        t.entry(c).or_insert([0, 0])[usize::from(y)] += 1;
    }
    t
}
