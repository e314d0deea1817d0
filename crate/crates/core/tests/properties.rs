#[path = "support/oracles.rs"]
mod oracles;

use proptest::prelude::*;

use cadvote_core::eval::{roc_auc, stratified_folds_for};
use cadvote_core::fixture::{fixture, fixture_sized};
use cadvote_core::preprocess::{smote, SmoteConfig, SmoteTarget};
use cadvote_core::selection::{discretize, score_codes};

#[test]
fn gain_ratio_matches_contingency_brute_force() {
    let n = oracles::gain_ratio_exhaustive().unwrap();
    assert!(n > 100_000, "only {n} datasets enumerated");
}

#[test]
fn mlp_backprop_matches_finite_differences() {
    let worst = oracles::mlp_gradient_check(50).unwrap();
    assert!(worst < oracles::GRADIENT_REL_TOL);
}

#[test]
fn metric_identities_hold() {
    let defined = oracles::metric_identities(1000, 4).unwrap();
    assert!(defined > 500 && defined < 1000, "fuzz should mix defined and degenerate cases: {defined}");
}

#[test]
fn auc_properties_hold() {
    oracles::auc_properties(100, 5).unwrap();
}

#[test]
fn auc_of_random_scores_is_near_half() {
    use rand::Rng;
    let mut rng = cadvote_core::rng::seeded(6);
    let scored: Vec<(u8, f64)> = (0..4000).map(|_| (u8::from(rng.random_bool(0.5)), rng.random())).collect();
    let (_, a) = roc_auc(&scored).unwrap();
    assert!((a - 0.5).abs() < 0.05, "{a}");
}

#[test]
fn folds_stratify_fuzzed_labels() {
    oracles::fold_fuzz(1000, 7).unwrap();
}

#[test]
fn cohort_shape_folds() {
    for seed in 0..20 {
        oracles::cohort_folds(seed).unwrap();
    }
}

#[test]
fn smote_properties_on_fixture() {
    oracles::smote_properties(&fixture(8), 8).unwrap();
    oracles::smote_properties(&fixture_sized(30, 12, 9), 9).unwrap();
}

#[test]
fn smote_percentage_target() {
    let d = fixture_sized(40, 10, 10);
    let out = smote(
        &d,
        &SmoteConfig {
            target: SmoteTarget::Percentage(200),
            ..SmoteConfig::default()
        },
    )
    .unwrap();
    assert_eq!(out.class_counts(), [30, 40]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn gain_ratio_bounded(codes in proptest::collection::vec(0usize..5, 2..60), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = cadvote_core::rng::seeded(seed);
        let labels: Vec<u8> = codes.iter().map(|_| u8::from(rng.random_bool(0.5))).collect();
        let s = score_codes(&codes, &labels, None);
        prop_assert!(s.info_gain >= 0.0 && s.info_gain <= 1.0 + 1e-12);
        if let Some(r) = s.ratio() {
            // IG ≤ min(H(class), H(attribute))
            prop_assert!((0.0..=1.0 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn discretization_is_monotone(column in proptest::collection::vec(-50.0f64..50.0, 1..120), bins in 1usize..12) {
        let d = discretize(&column, bins);
        prop_assert!(d.n_bins() <= bins);
        for (i, &a) in column.iter().enumerate() {
            for (j, &b) in column.iter().enumerate() {
                if a < b {
                    prop_assert!(d.codes[i] <= d.codes[j]);
                }
            }
        }
    }

    #[test]
    fn folds_partition_every_index(labels in proptest::collection::vec(0u8..2, 2..200), k in 2usize..12, seed in any::<u64>()) {
        prop_assume!(k <= labels.len());
        let plan = stratified_folds_for(&labels, k, seed).unwrap();
        let mut seen = vec![0; labels.len()];
        for t in 0..k {
            for i in plan.split(t).1 {
                seen[i] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        prop_assert_eq!(plan, stratified_folds_for(&labels, k, seed).unwrap());
    }

    #[test]
    fn auc_in_unit_interval(scores in proptest::collection::vec((0u8..2, 0.0f64..1.0), 2..80)) {
        prop_assume!(scores.iter().any(|s| s.0 == 1) && scores.iter().any(|s| s.0 == 0));
        let (pts, a) = roc_auc(&scores).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a - oracles::auc_pairs(&scores)).abs() < oracles::AUC_TOL);
        let last = pts.last().unwrap();
        prop_assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        prop_assert!(pts.windows(2).all(|w| w[0].fpr <= w[1].fpr && w[0].tpr <= w[1].tpr));
    }
}
