//! Stratified cross-validation, metrics, ROC, grid search and benchmark reports.

mod benchmark;
mod cv;
mod folds;
mod grid;
mod metrics;
mod roc;

pub use benchmark::{benchmark_report, default_pipelines, Benchmark, BenchmarkRow, REPORT_COLUMNS};
pub use cv::{
    cross_validate, fit_pipeline_model, prepare, run_pipeline, train_pipeline, CvOutcome, HeldOut, Mode,
    PipelineSpec, Prepared, Preprocessing, Tuning,
};
pub use folds::{stratified_folds, stratified_folds_for, FoldPlan};
pub use grid::{cv_accuracy, grid_search, Grid, GridCell, GridResult};
pub use metrics::{
    accuracy, compute_metrics, confusion, f_measure, kappa, mcc, precision, recall, rmse, specificity,
    ConfusionMatrix, MetricsReport,
};
pub use roc::{roc_auc, RocPoint};
