//! Coronary artery disease classification: data model, preprocessing,
//! gain-ratio feature selection, from-scratch classifiers, a hard-voting
//! ensemble and cross-validated evaluation.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod classifiers;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod fixture;
pub mod preprocess;
pub mod rng;
pub mod schema;
pub mod selection;
pub mod stats;

pub use bundle::{load_bundle, save_bundle, ModelBundle};
pub use classifiers::{predict, train, ModelKind, ModelSpec, Prediction, Query, TrainedModel};
pub use data::{load_dataset, Dataset, LoadOptions, PatientRecord};
pub use error::{Error, Result};
pub use schema::{FeatureKind, FeatureSchema, FeatureSpec};
