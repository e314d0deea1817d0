//! Seeded synthetic stand-in for the 303-patient cohort.
//!
//! Class balance is 216 CAD to 84 normal (72/28). Marginals loosely follow the
//! published summary, with the strongest pairwise structure kept (HTN–BP,
//! DM–FBS, TypicalChestPain versus Atypical, RegionRWMA–EF-TTE). Not clinical
//! data.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use crate::data::{Dataset, PatientRecord};
use crate::rng::seeded;
use crate::schema::FeatureSchema;

pub const FIXTURE_POSITIVES: usize = 216;
pub const FIXTURE_NEGATIVES: usize = 84;

/// 300 records under [`FeatureSchema::cad12`], order shuffled by `seed`.
pub fn fixture(seed: u64) -> Dataset {
    fixture_sized(FIXTURE_POSITIVES, FIXTURE_NEGATIVES, seed)
}

pub fn fixture_sized(positives: usize, negatives: usize, seed: u64) -> Dataset {
    let mut rng = seeded(seed);
    let mut records: Vec<PatientRecord> = (0..positives + negatives)
        .map(|i| synth(u8::from(i < positives), &mut rng))
        .collect();
    records.shuffle(&mut rng);
    Dataset::new(FeatureSchema::cad12(), records, &format!("fixture seed={seed}")).expect("fixture conforms to schema")
}

fn normal(rng: &mut impl Rng, mean: f64, sd: f64) -> f64 {
    Normal::new(mean, sd).expect("finite sd").sample(rng)
}

fn bit(rng: &mut impl Rng, p: f64) -> f64 {
    f64::from(u8::from(rng.random_bool(p)))
}

fn synth(label: u8, rng: &mut impl Rng) -> PatientRecord {
    let cad = label == 1;
    let pick = |a: f64, b: f64| if cad { a } else { b };

    let age = normal(rng, pick(61.0, 52.5), 9.5).clamp(30.0, 86.0).round();
    let dm = bit(rng, pick(0.36, 0.14));
    let htn = bit(rng, pick(0.67, 0.40));
    let bp = normal(rng, if htn == 1.0 { 137.0 } else { 119.0 }, 15.0).clamp(90.0, 190.0).round();
    let typical = bit(rng, pick(0.70, 0.17));
    let atypical = if typical == 1.0 { 0.0 } else { bit(rng, pick(0.55, 0.72)) };
    let nonanginal = if typical == 1.0 || atypical == 1.0 { 0.0 } else { bit(rng, 0.35) };
    let tinversion = bit(rng, pick(0.35, 0.16));
    let fbs = if dm == 1.0 { normal(rng, 175.0, 60.0) } else { normal(rng, 95.0, 14.0) }
        .clamp(62.0, 400.0)
        .round();
    let esr = LogNormal::new(pick(2.8, 2.6), 0.7).expect("finite").sample(rng).clamp(1.0, 90.0).round();
    let k = (normal(rng, 4.23, 0.45).clamp(3.0, 6.6) * 10.0).round() / 10.0;
    let rwma = if rng.random_bool(pick(0.36, 0.05)) {
        f64::from(rng.random_range(1..=4u8))
    } else {
        0.0
    };
    let ef = (normal(rng, pick(49.5, 53.0), 6.0) - 4.0 * rwma).clamp(15.0, 60.0).round();

    PatientRecord::new(
        vec![age, dm, htn, bp, typical, atypical, nonanginal, tinversion, fbs, esr, k, ef, rwma],
        Some(label),
    )
}
