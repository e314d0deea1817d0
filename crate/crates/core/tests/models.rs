use proptest::prelude::*;
use rand::Rng;

use cadvote_core::classifiers::{
    fit_forest, fit_knn, fit_naive_bayes, fit_tree, AdaBoostParams, ForestParams, KnnParams, MlpParams, Payload,
    Samples, TreeParams, VotingParams,
};
use cadvote_core::ensemble::{combine, TieBreak};
use cadvote_core::fixture::{fixture, fixture_sized};
use cadvote_core::rng::seeded;
use cadvote_core::schema::ValidRange;
use cadvote_core::{train, Dataset, FeatureSchema, ModelSpec, PatientRecord, Prediction};

fn mixed_schema() -> FeatureSchema {
    FeatureSchema::parse(
        "schema mixed 1\nlabel y | yes | 1=1, 0=0\n\
         feature A | binary | - | 0,1 |\n\
         feature R | ordinal | - | 0,1,2,3 |\n\
         feature X | numeric | - | -100..100 |\n",
    )
    .unwrap()
}

fn mixed_data(n: usize, seed: u64) -> Dataset {
    let mut rng = seeded(seed);
    let records = (0..n)
        .map(|_| {
            let y = u8::from(rng.random_bool(0.4));
            let a = f64::from(u8::from(rng.random_bool(if y == 1 { 0.7 } else { 0.3 })));
            // R never takes 3 in training
            let r = f64::from(rng.random_range(0..3u8));
            let x = rng.random_range(-10.0..10.0) + 3.0 * f64::from(y);
            PatientRecord::new(vec![a, r, x], Some(y))
        })
        .collect();
    Dataset::new(mixed_schema(), records, "mixed").unwrap()
}

/// Posterior from the joint class/value table, computed directly.
fn bayes_by_hand(d: &Dataset, x: &[f64]) -> f64 {
    let n = d.len() as f64;
    let mut score = [0.0f64; 2];
    for (c, s) in score.iter_mut().enumerate() {
        let rows: Vec<&PatientRecord> = d.records.iter().filter(|r| r.label == Some(c as u8)).collect();
        let nc = rows.len() as f64;
        let mut p = nc / n;
        for (j, xj) in x.iter().enumerate().take(2) {
            let mut distinct: Vec<f64> = d.records.iter().map(|r| r.values[j]).collect();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            let count = rows.iter().filter(|r| r.values[j] == *xj).count() as f64;
            p *= (count + 1.0) / (nc + distinct.len() as f64 + 1.0);
        }
        let xs: Vec<f64> = rows.iter().map(|r| r.values[2]).collect();
        let mean = xs.iter().sum::<f64>() / nc;
        let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nc - 1.0);
        p *= (-(x[2] - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
        *s = p;
    }
    score[1] / (score[0] + score[1])
}

#[test]
fn naive_bayes_matches_joint_table() {
    let d = mixed_data(80, 1);
    let nb = fit_naive_bayes(&Samples::from_dataset(&d).unwrap()).unwrap();
    for a in [0.0, 1.0] {
        for r in [0.0, 1.0, 2.0, 3.0] {
            for x in [-8.0, 0.0, 2.5, 9.0] {
                let q = [a, r, x];
                let (got, want) = (nb.probability(&q), bayes_by_hand(&d, &q));
                assert!((got - want).abs() < 1e-12, "{q:?}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn single_unbootstrapped_forest_is_a_tree() {
    for seed in 0..5 {
        let d = fixture_sized(60, 40, seed);
        let s = Samples::from_dataset(&d).unwrap();
        let tree_params = TreeParams {
            min_leaf: 1,
            prune: false,
            ..TreeParams::default()
        };
        let tree = fit_tree(&s, &tree_params).unwrap();
        let forest = fit_forest(
            &s,
            &ForestParams {
                n_trees: 1,
                features_per_split: Some(s.n_features()),
                bootstrap: false,
                seed,
                tree: tree_params,
            },
        )
        .unwrap();
        assert_eq!(forest.trees[0], tree);
        let probe = fixture(seed + 100);
        for r in &probe.records {
            assert_eq!(forest.probability(&r.values), tree.probability(&r.values));
        }
    }
}

#[test]
fn knn_matches_brute_force_neighbours() {
    let d = mixed_data(50, 2);
    let s = Samples::from_dataset(&d).unwrap();
    let knn = fit_knn(&s, &KnnParams { k: 7 }).unwrap();
    let xs: Vec<f64> = s.rows.iter().map(|r| r[2]).collect();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let sd = (xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt();
    let probe = mixed_data(20, 3);
    for r in &probe.records {
        let q = &r.values;
        let mut dist: Vec<(f64, usize)> = s
            .rows
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let dx = (p[2] - q[2]) / sd;
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + dx * dx, i)
            })
            .collect();
        dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let want: Vec<usize> = dist[..7].iter().map(|p| p.1).collect();
        assert_eq!(knn.neighbours(q), want);
    }
}

fn small_specs(seed: u64) -> Vec<ModelSpec> {
    vec![
        ModelSpec::Tree(TreeParams::default()),
        ModelSpec::Forest(ForestParams {
            n_trees: 10,
            seed,
            ..Default::default()
        }),
        ModelSpec::AdaBoost(AdaBoostParams {
            n_rounds: 10,
            seed,
            ..Default::default()
        }),
        ModelSpec::Mlp(MlpParams {
            epochs: 60,
            seed,
            ..Default::default()
        }),
        ModelSpec::NaiveBayes,
        ModelSpec::Knn(KnnParams { k: 5 }),
    ]
}

fn voting_spec(seed: u64) -> ModelSpec {
    let s = small_specs(seed);
    ModelSpec::Voting(VotingParams {
        members: vec![s[3].clone(), s[1].clone(), s[2].clone()],
        tie_break: TieBreak::Confidence,
        seed,
    })
}

fn random_row(schema: &FeatureSchema, rng: &mut impl Rng) -> Vec<f64> {
    schema
        .features
        .iter()
        .map(|f| match &f.range {
            ValidRange::Interval { min, max } => {
                let v = rng.random_range(*min..=*max);
                // one value in ten far outside the valid range
                if rng.random_bool(0.1) {
                    v * rng.random_range(-20.0..20.0)
                } else {
                    v
                }
            }
            ValidRange::Categories(c) => c[rng.random_range(0..c.len())],
        })
        .collect()
}

#[test]
fn predictions_are_probabilities_on_fuzzed_records() {
    let d = fixture(4);
    let mut specs = small_specs(4);
    specs.push(voting_spec(4));
    let mut rng = seeded(4);
    let rows: Vec<Vec<f64>> = (0..10_000).map(|_| random_row(&d.schema, &mut rng)).collect();
    for spec in &specs {
        let m = train(&d, spec).unwrap();
        for row in &rows {
            let p = m.predict_row(row);
            assert!((0.0..=1.0).contains(&p.p_positive), "{}: {p:?} for {row:?}", m.kind());
            match m.vote_row(row) {
                None => assert_eq!(p.label, u8::from(p.p_positive >= 0.5)),
                Some(v) => {
                    let ones = v.per_member.iter().filter(|(_, q)| q.label == 1).count();
                    assert_eq!(v.label, u8::from(2 * ones > v.per_member.len()));
                    assert_eq!(v.label, p.label);
                }
            }
        }
    }
}

#[test]
fn member_order_does_not_change_the_vote() {
    let d = fixture(5);
    let m = train(&d, &voting_spec(5)).unwrap();
    let mut shuffled = m.clone();
    let Payload::Voting(e) = &mut shuffled.payload else {
        panic!("voting payload expected")
    };
    e.members.rotate_left(1);
    e.members.swap(0, 1);
    let probe = fixture(6);
    for r in &probe.records {
        let (a, b) = (m.predict_row(&r.values), shuffled.predict_row(&r.values));
        assert_eq!(a.label, b.label);
        assert!((a.p_positive - b.p_positive).abs() < 1e-12);
    }
}

#[test]
fn training_is_seed_deterministic() {
    let d = fixture(7);
    for spec in small_specs(7).into_iter().chain([voting_spec(7)]) {
        assert_eq!(train(&d, &spec).unwrap(), train(&d, &spec).unwrap(), "{}", spec.kind());
    }
}

fn prediction() -> impl Strategy<Value = Prediction> {
    (0.0f64..=1.0).prop_map(Prediction::from_probability)
}

proptest! {
    #[test]
    fn combine_ignores_member_order(votes in proptest::collection::vec(prediction(), 2..8), rot in 0usize..8) {
        let mut moved = votes.clone();
        let r = rot % moved.len();
        moved.rotate_left(r);
        moved.reverse();
        for tb in [TieBreak::Confidence, TieBreak::Fixed(0), TieBreak::Fixed(1)] {
            prop_assert_eq!(combine(&votes, tb), combine(&moved, tb));
        }
    }

    // shrinking every score towards 0.5 by a common factor keeps each
    // member's side and the relative confidence of each side
    #[test]
    fn combine_ignores_symmetric_rescaling(votes in proptest::collection::vec(prediction(), 2..8), s in 0.01f64..1.0) {
        let rescaled: Vec<Prediction> = votes
            .iter()
            .map(|v| Prediction { label: v.label, p_positive: 0.5 + s * (v.p_positive - 0.5) })
            .collect();
        let (a, tied) = combine(&votes, TieBreak::Confidence);
        let (b, _) = combine(&rescaled, TieBreak::Confidence);
        if !tied {
            prop_assert_eq!(a, b);
        } else {
            // confidences scale by s exactly only up to rounding; compare when the gap is clear
            let conf = |l: u8| {
                let d: Vec<f64> = votes.iter().filter(|v| v.label == l).map(|v| (v.p_positive - 0.5).abs()).collect();
                d.iter().sum::<f64>() / d.len() as f64
            };
            if (conf(0) - conf(1)).abs() > 1e-9 {
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn hard_majority_decides(votes in proptest::collection::vec(prediction(), 3..9)) {
        let ones = votes.iter().filter(|v| v.label == 1).count();
        prop_assume!(2 * ones != votes.len());
        prop_assert_eq!(combine(&votes, TieBreak::Fixed(0)).0, u8::from(2 * ones > votes.len()));
    }
}
