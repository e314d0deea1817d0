//! Independent reference computations shared by the core suites and the
//! acceptance runner. Each check returns a one-line summary or the first
//! disagreement found.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;

use cadvote_core::classifiers::Mlp;
use cadvote_core::data::{Dataset, PatientRecord};
use cadvote_core::eval::{accuracy, f_measure, kappa, mcc, precision, recall, roc_auc, specificity, stratified_folds_for, ConfusionMatrix};
use cadvote_core::preprocess::{smote, SmoteConfig};
use cadvote_core::rng::seeded;
use cadvote_core::schema::FeatureSchema;
use cadvote_core::selection::gain_ratio;

pub const GAIN_RATIO_TOL: f64 = 1e-12;
pub const METRIC_TOL: f64 = 1e-12;
pub const GRADIENT_REL_TOL: f64 = 1e-4;
/// Floor on the relative-error denominator so that near-zero partials are
/// compared absolutely.
pub const GRADIENT_FLOOR: f64 = 1e-7;
pub const FD_STEP: f64 = 1e-6;
pub const SEGMENT_TOL: f64 = 1e-9;
pub const AUC_TOL: f64 = 1e-12;

// ---------------------------------------------------------------- gain ratio

fn entropy_bits(counts: impl IntoIterator<Item = usize>) -> f64 {
    let counts: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
    let n: usize = counts.iter().sum();
    counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}

/// `(information gain, split information)` from an explicit contingency table.
pub fn brute_gain_ratio(values: &[u8], labels: &[u8]) -> (f64, f64) {
    let mut table: BTreeMap<u8, [usize; 2]> = BTreeMap::new();
    for (&v, &y) in values.iter().zip(labels) {
        table.entry(v).or_default()[usize::from(y)] += 1;
    }
    let n = values.len() as f64;
    let ones = labels.iter().filter(|&&y| y == 1).count();
    let h_class = entropy_bits([ones, labels.len() - ones]);
    let conditional: f64 = table
        .values()
        .map(|row| (row[0] + row[1]) as f64 / n * entropy_bits(*row))
        .sum();
    let split = entropy_bits(table.values().map(|r| r[0] + r[1]));
    (h_class - conditional, split)
}

fn two_attribute_schema() -> FeatureSchema {
    FeatureSchema::parse(
        "schema tiny 1\nlabel y | yes | 1=1, 0=0\nfeature A | ordinal | - | 0,1,2 |\nfeature B | ordinal | - | 0,1,2 |\n",
    )
    .expect("valid schema")
}

fn compare_attribute(d: &Dataset, name: &str, values: &[u8], labels: &[u8]) -> Result<(), String> {
    let got = gain_ratio(d, name).map_err(|e| e.to_string())?;
    let (ig, split) = brute_gain_ratio(values, labels);
    let want = (split > 0.0).then(|| ig / split);
    let ok = (got.info_gain - ig).abs() <= GAIN_RATIO_TOL
        && match (got.gain_ratio, want) {
            (None, None) => true,
            (Some(a), Some(b)) => (a - b).abs() <= GAIN_RATIO_TOL,
            _ => false,
        };
    if ok {
        Ok(())
    } else {
        Err(format!(
            "{name}={values:?} y={labels:?}: got ({}, {:?}), brute force ({ig}, {want:?})",
            got.info_gain, got.gain_ratio
        ))
    }
}

/// Every dataset of 2..=6 rows over two attributes with at most three values
/// each and both classes present. Gain ratio ignores value names, so each
/// attribute runs over its value patterns up to relabeling (first-occurrence
/// order). Returns the number of datasets checked.
pub fn gain_ratio_exhaustive() -> Result<usize, String> {
    let schema = two_attribute_schema();
    let mut checked = 0;
    for n in 2..=6usize {
        let patterns = patterns(n);
        for a in &patterns {
            for b in &patterns {
                for mask in 1..(1u32 << n) - 1 {
                    let y: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
                    let records = (0..n)
                        .map(|i| PatientRecord::new(vec![f64::from(a[i]), f64::from(b[i])], Some(y[i])))
                        .collect();
                    let d = Dataset::new(schema.clone(), records, "enumerated").map_err(|e| e.to_string())?;
                    compare_attribute(&d, "A", a, &y)?;
                    compare_attribute(&d, "B", b, &y)?;
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

/// Length-`n` strings over {0,1,2} in first-occurrence order.
fn patterns(n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u8>| {
                let next = p.iter().max().map_or(0, |m| m + 1).min(2);
                (0..=next).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

// ------------------------------------------------------------------- MLP

/// Worst relative error between backprop and central differences over
/// `networks` random small networks.
pub fn mlp_gradient_check(networks: u64) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for net in 0..networks {
        let mut rng = seeded(10_000 + net);
        let p = rng.random_range(1..=5);
        let mut sizes = vec![p];
        for _ in 0..rng.random_range(1..=2) {
            sizes.push(rng.random_range(1..=4));
        }
        sizes.push(1);
        let moments = (0..p).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.5..2.0))).collect();
        let mut m = Mlp::random(&sizes, moments, net);
        let n = rng.random_range(4..=16);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let labels: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.5))).collect();

        let analytic = m.gradient(&rows, &labels);
        let theta = m.params();
        if analytic.len() != theta.len() {
            return Err(format!("network {net}: gradient has {} entries, params {}", analytic.len(), theta.len()));
        }
        for i in 0..theta.len() {
            let mut t = theta.clone();
            t[i] = theta[i] + FD_STEP;
            m.set_params(&t);
            let up = m.loss(&rows, &labels);
            t[i] = theta[i] - FD_STEP;
            m.set_params(&t);
            let down = m.loss(&rows, &labels);
            let numeric = (up - down) / (2.0 * FD_STEP);
            let rel = (analytic[i] - numeric).abs() / analytic[i].abs().max(numeric.abs()).max(GRADIENT_FLOOR);
            worst = worst.max(rel);
            if rel >= GRADIENT_REL_TOL {
                return Err(format!(
                    "network {net} {sizes:?} param {i}: backprop {} vs finite difference {numeric} (rel {rel:.2e})",
                    analytic[i]
                ));
            }
        }
        m.set_params(&theta);
    }
    Ok(worst)
}

// --------------------------------------------------------------- metrics

fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= tol,
        _ => false,
    }
}

/// Pearson correlation of 0/1 truth and prediction vectors.
fn phi_brute(pairs: &[(u8, u8)]) -> Option<f64> {
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| f64::from(p.0)).sum::<f64>() / n;
    let my = pairs.iter().map(|p| f64::from(p.1)).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let (dx, dy) = (f64::from(x) - mx, f64::from(y) - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Observed versus chance agreement computed from the raw pair list.
fn kappa_brute(pairs: &[(u8, u8)]) -> Option<f64> {
    let n = pairs.len() as f64;
    let agree = pairs.iter().filter(|p| p.0 == p.1).count() as f64 / n;
    let mut chance = 0.0;
    for c in 0..2u8 {
        let truth = pairs.iter().filter(|p| p.0 == c).count() as f64 / n;
        let pred = pairs.iter().filter(|p| p.1 == c).count() as f64 / n;
        chance += truth * pred;
    }
    (chance < 1.0).then(|| (agree - chance) / (1.0 - chance))
}

/// Fuzzes `count` confusion matrices; returns how many had every metric defined.
pub fn metric_identities(count: usize, seed: u64) -> Result<usize, String> {
    let mut rng = seeded(seed);
    let mut fully_defined = 0;
    for case in 0..count {
        let n = rng.random_range(1..=60);
        // skewed rates so degenerate matrices come up
        let (pt, pp) = (rng.random_range(0.0..=1.0f64).powi(2), rng.random_range(0.0..=1.0f64));
        let pairs: Vec<(u8, u8)> = (0..n)
            .map(|_| (u8::from(rng.random_bool(pt)), u8::from(rng.random_bool(pp))))
            .collect();
        let mut cm = ConfusionMatrix::default();
        for &(t, p) in &pairs {
            cm.add(t, p);
        }
        let count_of = |t: u8, p: u8| pairs.iter().filter(|x| **x == (t, p)).count() as u64;
        let (tp, fp, fn_, tn) = (count_of(1, 1), count_of(0, 1), count_of(1, 0), count_of(0, 0));
        let err = |what: &str| Err(format!("case {case} {cm:?}: {what}"));

        if (cm.tp, cm.fp, cm.fn_, cm.tn) != (tp, fp, fn_, tn) {
            return err("cell counts");
        }
        let div = |a: u64, b: u64| (b > 0).then(|| a as f64 / b as f64);
        // exact agreement for the three count ratios
        if accuracy(&cm) != div(tp + tn, tp + tn + fp + fn_) {
            return err("accuracy");
        }
        if precision(&cm) != div(tp, tp + fp) {
            return err("precision");
        }
        if recall(&cm) != div(tp, tp + fn_) {
            return err("recall");
        }
        if specificity(&cm) != div(tn, tn + fp) {
            return err("specificity");
        }
        let harmonic = match (precision(&cm), recall(&cm)) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 / (1.0 / p + 1.0 / r)),
            _ => None,
        };
        if !close(f_measure(&cm), harmonic, METRIC_TOL) {
            return err(&format!("F {:?} vs harmonic mean {harmonic:?}", f_measure(&cm)));
        }
        if !close(mcc(&cm), phi_brute(&pairs), METRIC_TOL) {
            return err(&format!("MCC {:?} vs phi {:?}", mcc(&cm), phi_brute(&pairs)));
        }
        if !close(kappa(&cm), kappa_brute(&pairs), METRIC_TOL) {
            return err(&format!("kappa {:?} vs brute {:?}", kappa(&cm), kappa_brute(&pairs)));
        }
        if [accuracy(&cm), precision(&cm), recall(&cm), f_measure(&cm), mcc(&cm), kappa(&cm)]
            .iter()
            .all(Option::is_some)
        {
            fully_defined += 1;
        }
    }
    Ok(fully_defined)
}

// ------------------------------------------------------------------- AUC

/// Mann–Whitney estimate: P(score⁺ > score⁻) + ½ P(tie).
pub fn auc_pairs(scored: &[(u8, f64)]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for &(ya, sa) in scored {
        if ya != 1 {
            continue;
        }
        for &(yb, sb) in scored {
            if yb != 0 {
                continue;
            }
            pairs += 1.0;
            if sa > sb {
                wins += 1.0;
            } else if sa == sb {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

fn random_scored(rng: &mut impl Rng, coarse: bool) -> Vec<(u8, f64)> {
    let n = rng.random_range(2..=80);
    let mut s: Vec<(u8, f64)> = (0..n)
        .map(|_| {
            let y = u8::from(rng.random_bool(0.4));
            let x: f64 = rng.random_range(0.0..1.0) + if y == 1 { 0.2 } else { 0.0 };
            (y, if coarse { (x * 5.0).round() / 5.0 } else { x })
        })
        .collect();
    s[0].0 = 1;
    s[1].0 = 0;
    s
}

type Transform = (&'static str, fn(f64) -> f64);

/// Monotone invariance on `sets` fuzzed score sets, plus the two fixed points.
pub fn auc_properties(sets: usize, seed: u64) -> Result<String, String> {
    let mut rng = seeded(seed);
    let transforms: [Transform; 3] =
        [("exp", |x| (3.0 * x).exp()), ("cube", |x| x * x * x + 7.0), ("logit", |x| (x / (2.0 - x)).ln())];
    let mut worst: f64 = 0.0;
    for set in 0..sets {
        let scored = random_scored(&mut rng, set % 2 == 0);
        let (_, base) = roc_auc(&scored).map_err(|e| e.to_string())?;
        let brute = auc_pairs(&scored);
        if (base - brute).abs() > AUC_TOL {
            return Err(format!("set {set}: trapezoid {base} vs pair count {brute}"));
        }
        for (name, f) in transforms {
            let moved: Vec<(u8, f64)> = scored.iter().map(|&(y, s)| (y, f(s))).collect();
            let (_, a) = roc_auc(&moved).map_err(|e| e.to_string())?;
            worst = worst.max((a - base).abs());
            if (a - base).abs() > AUC_TOL {
                return Err(format!("set {set}: AUC {base} became {a} under {name}"));
            }
        }
    }
    let separated: Vec<(u8, f64)> = (0..20).map(|i| (u8::from(i >= 10), f64::from(i) / 20.0)).collect();
    let (_, a) = roc_auc(&separated).map_err(|e| e.to_string())?;
    if a != 1.0 {
        return Err(format!("perfect separation gave {a}"));
    }
    let constant: Vec<(u8, f64)> = (0..20).map(|i| (u8::from(i % 3 == 0), 0.42)).collect();
    let (_, a) = roc_auc(&constant).map_err(|e| e.to_string())?;
    if a != 0.5 {
        return Err(format!("constant scores gave {a}"));
    }
    Ok(format!("{sets} sets, worst shift {worst:.1e}; separated 1.0, constant 0.5"))
}

// ----------------------------------------------------------------- folds

/// Fold sizes differ by at most one, and so does every class's per-fold count.
pub fn check_plan(labels: &[u8], k: usize, seed: u64) -> Result<Vec<(usize, usize)>, String> {
    let plan = stratified_folds_for(labels, k, seed).map_err(|e| e.to_string())?;
    if plan.assignments.len() != labels.len() || plan.assignments.iter().any(|&f| f >= k) {
        return Err(format!("k={k}: bad assignment vector"));
    }
    let mut per_fold = vec![(0usize, 0usize); k];
    for (&f, &y) in plan.assignments.iter().zip(labels) {
        if y == 1 {
            per_fold[f].1 += 1;
        } else {
            per_fold[f].0 += 1;
        }
    }
    let spread = |v: Vec<usize>| v.iter().max().unwrap() - v.iter().min().unwrap();
    let sizes: Vec<usize> = per_fold.iter().map(|c| c.0 + c.1).collect();
    if spread(sizes.clone()) > 1 {
        return Err(format!("n={} k={k}: fold sizes {sizes:?}", labels.len()));
    }
    if spread(per_fold.iter().map(|c| c.1).collect()) > 1 || spread(per_fold.iter().map(|c| c.0).collect()) > 1 {
        return Err(format!("n={} k={k}: class counts {per_fold:?}", labels.len()));
    }
    for t in 0..k {
        let (train, test) = plan.split(t);
        if train.len() + test.len() != labels.len() || test.iter().any(|i| train.contains(i)) {
            return Err(format!("fold {t}: train/test overlap"));
        }
    }
    Ok(per_fold)
}

/// Random plans of assorted sizes and balances.
pub fn fold_fuzz(plans: usize, seed: u64) -> Result<usize, String> {
    let mut rng = seeded(seed);
    for _ in 0..plans {
        let n = rng.random_range(2..=400);
        let rate = rng.random_range(0.05..0.95);
        let labels: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(rate))).collect();
        let k = rng.random_range(2..=n.min(20));
        check_plan(&labels, k, rng.random())?;
    }
    Ok(plans)
}

/// The cohort shape: 216 positives, 87 negatives, ten folds.
pub fn cohort_folds(seed: u64) -> Result<String, String> {
    let labels: Vec<u8> = (0..303).map(|i| u8::from(i < 216)).collect();
    let per_fold = check_plan(&labels, 10, seed)?;
    let sizes: Vec<usize> = per_fold.iter().map(|c| c.0 + c.1).collect();
    if sizes.iter().any(|&s| s != 30 && s != 31) {
        return Err(format!("fold sizes {sizes:?}"));
    }
    let pos: Vec<usize> = per_fold.iter().map(|c| c.1).collect();
    Ok(format!("sizes {sizes:?}, positives {pos:?}"))
}

// ----------------------------------------------------------------- SMOTE

/// Balance, segment membership and seeded determinism on `d`.
pub fn smote_properties(d: &Dataset, seed: u64) -> Result<String, String> {
    let cfg = SmoteConfig {
        seed,
        ..SmoteConfig::default()
    };
    let out = smote(d, &cfg).map_err(|e| e.to_string())?;
    let counts = out.class_counts();
    if counts[0] != counts[1] {
        return Err(format!("class counts after balance: {counts:?}"));
    }
    let again = smote(d, &cfg).map_err(|e| e.to_string())?;
    if again.records != out.records {
        return Err("same seed gave different output".into());
    }
    let original = d.class_counts();
    let minority = u8::from(original[1] < original[0]);
    let parents: Vec<&PatientRecord> = d.records.iter().filter(|r| r.label == Some(minority)).collect();
    let numeric: Vec<usize> = (0..d.n_features()).filter(|&j| d.schema.features[j].kind.is_numeric()).collect();
    let synthetic: Vec<&PatientRecord> = out.records.iter().filter(|r| r.synthetic).collect();
    if out.records[..d.len()] != d.records[..] {
        return Err("original records were altered".into());
    }
    for (s_i, s) in synthetic.iter().enumerate() {
        let on_some_segment = parents.iter().any(|a| {
            parents.iter().any(|b| {
                // all numeric coordinates must share one interpolation weight
                let mut u: Option<f64> = None;
                let numeric_ok = numeric.iter().all(|&j| {
                    let (x, y, v) = (a.values[j], b.values[j], s.values[j]);
                    if (y - x).abs() <= SEGMENT_TOL {
                        return (v - x).abs() <= SEGMENT_TOL;
                    }
                    let t = (v - x) / (y - x);
                    if !(-SEGMENT_TOL..=1.0 + SEGMENT_TOL).contains(&t) {
                        return false;
                    }
                    match u {
                        None => {
                            u = Some(t);
                            true
                        }
                        Some(u0) => (x + u0 * (y - x) - v).abs() <= SEGMENT_TOL,
                    }
                });
                numeric_ok
                    && (0..d.n_features())
                        .filter(|j| !numeric.contains(j))
                        .all(|j| s.values[j] == a.values[j] || s.values[j] == b.values[j])
            })
        });
        if !on_some_segment {
            return Err(format!("synthetic record {s_i} lies on no parent–neighbour segment"));
        }
    }
    let other = smote(d, &SmoteConfig { seed: seed + 1, ..cfg }).map_err(|e| e.to_string())?;
    if other.records == out.records {
        return Err("different seeds gave identical output".into());
    }
    Ok(format!("{} synthetic, classes {counts:?}", synthetic.len()))
}
