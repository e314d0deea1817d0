//! Top-down decision tree induction with gain-ratio splits.
//!
//! Numeric features are split in two at the midpoint threshold with the
//! highest information gain; binary and ordinal features split multiway on
//! their observed values. Among the candidate splits whose gain is at least
//! the average gain, the one with the best gain ratio wins. Leaves report the
//! Laplace-smoothed class frequency `(n₁ + 1) / (n + 2)`.

use rand::seq::index;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Samples;
use crate::error::{Error, Result};
use crate::schema::FeatureKind;
use crate::selection::score_codes;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Minimum number of records on each side of a split.
    pub min_leaf: usize,
    /// `None` grows until purity.
    pub max_depth: Option<usize>,
    /// Pessimistic-error subtree replacement after growth.
    pub prune: bool,
    /// Confidence factor for pruning.
    pub confidence: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_leaf: 2,
            max_depth: None,
            prune: true,
            confidence: 0.25,
        }
    }
}

impl TreeParams {
    pub(crate) fn validate(&self) -> std::result::Result<(), String> {
        if self.min_leaf == 0 {
            return Err("min_leaf must be >= 1".into());
        }
        if !(self.confidence > 0.0 && self.confidence <= 0.5) {
            return Err("confidence must be in (0, 0.5]".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// Weighted class counts of the training records reaching this node.
    pub counts: [f64; 2],
    pub split: Option<Split>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Split {
    /// `x[feature] <= threshold` goes to `below`.
    Threshold {
        feature: usize,
        threshold: f64,
        below: Box<Node>,
        above: Box<Node>,
    },
    /// One child per observed value; unseen values stop at this node.
    Multiway {
        feature: usize,
        values: Vec<f64>,
        children: Vec<Node>,
    },
}

impl Node {
    fn leaf(counts: [f64; 2]) -> Self {
        Node { counts, split: None }
    }

    pub fn probability(&self) -> f64 {
        (self.counts[1] + 1.0) / (self.counts[0] + self.counts[1] + 2.0)
    }

    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }

    pub fn depth(&self) -> usize {
        match &self.split {
            None => 0,
            Some(Split::Threshold { below, above, .. }) => 1 + below.depth().max(above.depth()),
            Some(Split::Multiway { children, .. }) => 1 + children.iter().map(Node::depth).max().unwrap_or(0),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match &self.split {
            None => 1,
            Some(Split::Threshold { below, above, .. }) => below.n_leaves() + above.n_leaves(),
            Some(Split::Multiway { children, .. }) => children.iter().map(Node::n_leaves).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: Node,
}

impl DecisionTree {
    pub fn probability(&self, x: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match &node.split {
                None => return node.probability(),
                Some(Split::Threshold {
                    feature,
                    threshold,
                    below,
                    above,
                }) => {
                    node = if x[*feature] <= *threshold { below } else { above };
                }
                Some(Split::Multiway {
                    feature,
                    values,
                    children,
                }) => match values.iter().position(|v| *v == x[*feature]) {
                    Some(i) => node = &children[i],
                    None => return node.probability(),
                },
            }
        }
    }

    pub fn label(&self, x: &[f64]) -> u8 {
        u8::from(self.probability(x) >= 0.5)
    }
}

/// Fits an unweighted tree on all records.
pub fn fit_tree(s: &Samples, params: &TreeParams) -> Result<DecisionTree> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let weights = vec![1.0; s.len()];
    Ok(grow(s, (0..s.len()).collect(), &weights, params, None))
}

/// Grows a tree on the multiset `idx` of records.
///
/// With `sampler = Some((m, rng))` each node considers `m` features drawn
/// without replacement (all features when `m` covers them).
pub(crate) fn grow(
    s: &Samples,
    idx: Vec<usize>,
    weights: &[f64],
    params: &TreeParams,
    sampler: Option<(usize, &mut ChaCha8Rng)>,
) -> DecisionTree {
    let mut g = Grower {
        s,
        weights,
        params,
        sampler,
    };
    let mut root = g.grow(idx, 0);
    if params.prune {
        prune(&mut root, params.confidence);
    }
    DecisionTree { root }
}

struct Grower<'a, 'r> {
    s: &'a Samples,
    weights: &'a [f64],
    params: &'a TreeParams,
    sampler: Option<(usize, &'r mut ChaCha8Rng)>,
}

struct Candidate {
    feature: usize,
    gain: f64,
    ratio: f64,
    threshold: Option<f64>,
}

fn entropy2(c: [f64; 2]) -> f64 {
    let t = c[0] + c[1];
    if t <= 0.0 {
        return 0.0;
    }
    c.iter().filter(|&&x| x > 0.0).map(|&x| -(x / t) * (x / t).log2()).sum()
}

impl Grower<'_, '_> {
    fn counts(&self, idx: &[usize]) -> [f64; 2] {
        let mut c = [0.0; 2];
        for &i in idx {
            c[usize::from(self.s.labels[i])] += self.weights[i];
        }
        c
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> Node {
        let counts = self.counts(&idx);
        let pure = counts[0] == 0.0 || counts[1] == 0.0;
        let depth_reached = self.params.max_depth.is_some_and(|m| depth >= m);
        if pure || depth_reached || idx.len() < 2 * self.params.min_leaf {
            return Node::leaf(counts);
        }

        let p = self.s.n_features();
        let features: Vec<usize> = match &mut self.sampler {
            Some((m, rng)) if *m < p => {
                let mut f = index::sample(*rng, p, *m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..p).collect(),
        };

        let candidates: Vec<Candidate> = features
            .iter()
            .filter_map(|&f| match self.s.kinds[f] {
                FeatureKind::Numeric => self.numeric_candidate(&idx, f, counts),
                _ => self.multiway_candidate(&idx, f),
            })
            .collect();
        let Some(best) = choose(&candidates) else {
            return Node::leaf(counts);
        };

        let split = match best.threshold {
            Some(t) => {
                let (below, above): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&i| self.s.rows[i][best.feature] <= t);
                Split::Threshold {
                    feature: best.feature,
                    threshold: t,
                    below: Box::new(self.grow(below, depth + 1)),
                    above: Box::new(self.grow(above, depth + 1)),
                }
            }
            None => {
                let values = distinct_values(self.s, &idx, best.feature);
                let mut parts: Vec<Vec<usize>> = vec![Vec::new(); values.len()];
                for &i in &idx {
                    let v = self.s.rows[i][best.feature];
                    let k = values.iter().position(|x| *x == v).expect("value collected above");
                    parts[k].push(i);
                }
                let children = parts.into_iter().map(|part| self.grow(part, depth + 1)).collect();
                Split::Multiway {
                    feature: best.feature,
                    values,
                    children,
                }
            }
        };
        Node {
            counts,
            split: Some(split),
        }
    }

    fn numeric_candidate(&self, idx: &[usize], f: usize, total: [f64; 2]) -> Option<Candidate> {
        let mut order: Vec<usize> = idx.to_vec();
        order.sort_by(|&a, &b| self.s.rows[a][f].total_cmp(&self.s.rows[b][f]));
        let w_total = total[0] + total[1];
        let h_parent = entropy2(total);
        let min_leaf = self.params.min_leaf;

        let mut left = [0.0; 2];
        let mut best: Option<(f64, usize, [f64; 2])> = None;
        for pos in 1..order.len() {
            let prev = order[pos - 1];
            left[usize::from(self.s.labels[prev])] += self.weights[prev];
            let (a, b) = (self.s.rows[prev][f], self.s.rows[order[pos]][f]);
            if a == b || pos < min_leaf || order.len() - pos < min_leaf {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let (wl, wr) = (left[0] + left[1], right[0] + right[1]);
            let gain = h_parent - (wl / w_total) * entropy2(left) - (wr / w_total) * entropy2(right);
            if best.is_none_or(|(g, _, _)| gain > g) {
                best = Some((gain, pos, left));
            }
        }
        let (gain, pos, left) = best?;
        let (a, b) = (self.s.rows[order[pos - 1]][f], self.s.rows[order[pos]][f]);
        let mid = a + (b - a) / 2.0;
        let threshold = if mid < b { mid } else { a };
        let wl = left[0] + left[1];
        let split_info = entropy2([wl, w_total - wl]);
        Some(Candidate {
            feature: f,
            gain: gain.max(0.0),
            ratio: if split_info > 0.0 { gain.max(0.0) / split_info } else { 0.0 },
            threshold: Some(threshold),
        })
    }

    fn multiway_candidate(&self, idx: &[usize], f: usize) -> Option<Candidate> {
        let values = distinct_values(self.s, idx, f);
        if values.len() < 2 {
            return None;
        }
        let codes: Vec<usize> = idx
            .iter()
            .map(|&i| values.iter().position(|v| *v == self.s.rows[i][f]).expect("collected"))
            .collect();
        let mut sizes = vec![0usize; values.len()];
        for &c in &codes {
            sizes[c] += 1;
        }
        if sizes.iter().filter(|&&n| n >= self.params.min_leaf).count() < 2 {
            return None;
        }
        let labels: Vec<u8> = idx.iter().map(|&i| self.s.labels[i]).collect();
        let w: Vec<f64> = idx.iter().map(|&i| self.weights[i]).collect();
        let score = score_codes(&codes, &labels, Some(&w));
        Some(Candidate {
            feature: f,
            gain: score.info_gain,
            ratio: score.ratio().unwrap_or(0.0),
            threshold: None,
        })
    }
}

fn distinct_values(s: &Samples, idx: &[usize], f: usize) -> Vec<f64> {
    let mut v: Vec<f64> = idx.iter().map(|&i| s.rows[i][f]).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Best gain ratio among candidates whose gain reaches the mean gain; the
/// lowest feature index wins ties.
fn choose(candidates: &[Candidate]) -> Option<&Candidate> {
    if candidates.is_empty() {
        return None;
    }
    let mean_gain = candidates.iter().map(|c| c.gain).sum::<f64>() / candidates.len() as f64;
    candidates
        .iter()
        .filter(|c| c.gain >= mean_gain - 1e-12)
        .fold(None, |best: Option<&Candidate>, c| match best {
            Some(b) if b.ratio >= c.ratio => Some(b),
            _ => Some(c),
        })
}

/// Subtree replacement: collapse a subtree whenever the pessimistic error
/// of a leaf does not exceed that of the subtree. Returns estimated errors.
fn prune(node: &mut Node, cf: f64) -> f64 {
    let as_leaf = leaf_error_estimate(node.counts, cf);
    let subtree = match &mut node.split {
        None => return as_leaf,
        Some(Split::Threshold { below, above, .. }) => prune(below, cf) + prune(above, cf),
        Some(Split::Multiway { children, .. }) => children.iter_mut().map(|c| prune(c, cf)).sum(),
    };
    if as_leaf <= subtree + 0.1 {
        node.split = None;
        as_leaf
    } else {
        subtree
    }
}

fn leaf_error_estimate(counts: [f64; 2], cf: f64) -> f64 {
    let n = counts[0] + counts[1];
    let e = counts[0].min(counts[1]);
    e + added_errors(n, e, cf)
}

/// Extra errors from the upper confidence limit of the binomial error rate
/// (normal approximation with continuity correction).
fn added_errors(n: f64, e: f64, cf: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    if e < 1.0 {
        let base = n * (1.0 - cf.powf(1.0 / n));
        if e == 0.0 {
            return base;
        }
        return base + e * (added_errors(n, 1.0, cf) - base);
    }
    if e + 0.5 >= n {
        return (n - e).max(0.0);
    }
    let z = normal_quantile(1.0 - cf);
    let f = (e + 0.5) / n;
    let r = (f + z * z / (2.0 * n) + z * (f / n - f * f / n + z * z / (4.0 * n * n)).sqrt()) / (1.0 + z * z / n);
    r * n - e
}

/// Inverse standard normal CDF (Acklam's rational approximation).
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383_577_518_672_69e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [7.784695709041462e-3, 3.224671290700398e-1, 2.445134137142996, 3.754408661907416];
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < 0.02425 {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - 0.02425 {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}
