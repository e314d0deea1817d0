//! Standardization, IQR outlier reporting and SMOTE oversampling.

mod outliers;
mod scaling;
mod smote;

pub use outliers::{iqr_flag, FeatureOutliers, OutlierReport};
pub use scaling::{apply_standardizer, fit_standardizer, FeatureScale, ScalingParams};
pub use smote::{smote, SmoteConfig, SmoteTarget};
