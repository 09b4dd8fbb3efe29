//! Splitting, cross-validation, classification metrics and model comparison.

mod compare;
mod cv;
mod metrics;
pub mod report;
mod split;

pub use compare::{
    compare_models, speed_claim, CompareConfig, Comparison, ComparisonRow, ModelKind, SpeedVerdict,
    TimingReport,
};
pub use cv::{kfold_cv, stratified_folds, CvResult, FoldResult};
pub use metrics::{compute_metrics, ClassMetrics, Metrics};
pub use split::{train_test_split, Split};

pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
