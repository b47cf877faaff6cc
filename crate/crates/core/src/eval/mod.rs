//! Multi-label metrics and the cross-validation harness.

pub mod crossval;
pub mod metrics;

pub use crossval::{
    crossval_run, evaluate_fold, evaluate_folds, fold_spec, CrossvalOutput, EvaluationReport, FoldMetrics,
    ResampleStep,
};
pub use metrics::{auc_pr, average_precision, fscore, pr_curve, recall_per_label, Averaging, PrPoint};
