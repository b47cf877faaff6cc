use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{auc_pr, fscore, fscore_macro_present, recall_per_label, Averaging};
use crate::dataset::{FoldAssignment, LabelSpace, MultiLabelDataset};
use crate::error::{Error, Result};
use crate::learners::{train, ClassifierSpec, MlpParams};
use crate::matrix::{LabelMatrix, Matrix};
use crate::resample::{self, ResampleConfig, ResampleMethod};
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub test_size: usize,
    pub fscore_micro: f64,
    /// Over labels present in the fold's ground truth.
    pub fscore_macro: f64,
    pub fscore_samples: f64,
    pub auc_pr_macro: f64,
    pub recall_per_label: Vec<Option<f64>>,
    /// Labels with no positive example in this fold.
    pub excluded_labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub name: String,
    pub labels: Vec<String>,
    /// Means over folds.
    pub fscore_micro: f64,
    pub fscore_macro: f64,
    pub fscore_samples: f64,
    pub auc_pr_macro: f64,
    /// Mean over the folds where the label had positives.
    pub recall_per_label: Vec<Option<f64>>,
    pub per_fold: Vec<FoldMetrics>,
}

impl EvaluationReport {
    pub fn fold_fscores(&self) -> Vec<f64> {
        self.per_fold.iter().map(|f| f.fscore_micro).collect()
    }
}

pub fn evaluate_fold(
    fold: usize,
    y_true: &LabelMatrix,
    scores: &Matrix,
    preds: &LabelMatrix,
    label_space: &LabelSpace,
) -> Result<FoldMetrics> {
    let (macro_f, excluded) = fscore_macro_present(y_true, preds)?;
    let (ap, _) = auc_pr(y_true, scores)?;
    Ok(FoldMetrics {
        fold,
        test_size: y_true.rows(),
        fscore_micro: fscore(y_true, preds, Averaging::Micro)?,
        fscore_macro: macro_f,
        fscore_samples: fscore(y_true, preds, Averaging::Samples)?,
        auc_pr_macro: ap,
        recall_per_label: recall_per_label(y_true, preds)?,
        excluded_labels: excluded.iter().map(|&l| label_space.names()[l].clone()).collect(),
    })
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Scores the out-of-fold `scores`/`preds` (rows aligned with `labels`)
/// fold by fold and averages.
pub fn evaluate_folds(
    name: &str,
    labels: &LabelMatrix,
    label_space: &LabelSpace,
    folds: &FoldAssignment,
    scores: &Matrix,
    preds: &LabelMatrix,
) -> Result<EvaluationReport> {
    if scores.shape() != labels.shape() || preds.shape() != labels.shape() {
        return Err(Error::shape("out-of-fold matrices do not match the label matrix"));
    }
    if folds.fold_of.len() != labels.rows() {
        return Err(Error::shape("fold assignment does not cover the dataset"));
    }
    let per_fold = (0..folds.k)
        .map(|f| {
            let idx = folds.test_indices(f);
            evaluate_fold(
                f,
                &labels.select_rows(&idx),
                &scores.select_rows(&idx),
                &preds.select_rows(&idx),
                label_space,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let q = labels.cols();
    let recall = (0..q)
        .map(|l| {
            let vals: Vec<f64> = per_fold.iter().filter_map(|f| f.recall_per_label[l]).collect();
            (!vals.is_empty()).then(|| mean(vals.into_iter()))
        })
        .collect();
    Ok(EvaluationReport {
        name: name.to_string(),
        labels: label_space.names().to_vec(),
        fscore_micro: mean(per_fold.iter().map(|f| f.fscore_micro)),
        fscore_macro: mean(per_fold.iter().map(|f| f.fscore_macro)),
        fscore_samples: mean(per_fold.iter().map(|f| f.fscore_samples)),
        auc_pr_macro: mean(per_fold.iter().map(|f| f.auc_pr_macro)),
        recall_per_label: recall,
        per_fold,
    })
}

/// Optional training-fold resampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResampleStep {
    pub method: ResampleMethod,
    pub config: ResampleConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossvalOutput {
    pub report: EvaluationReport,
    /// Held-out scores for every example.
    pub scores: Matrix,
    pub preds: LabelMatrix,
}

/// Spec used for fold `f`: the MLP seed is mixed with the run seed.
pub fn fold_spec(spec: &ClassifierSpec, run_seed: u64, fold: usize) -> ClassifierSpec {
    let base = match spec {
        ClassifierSpec::BrMlp(MlpParams { seed, .. }) => *seed,
        _ => 0,
    };
    spec.with_seed(derive_seed(run_seed ^ base, &format!("fold{fold}")))
}

/// k-fold cross-validation of one classifier on `ds` (which must carry
/// features). Resampling, when given, touches training folds only.
pub fn crossval_run(
    name: &str,
    ds: &MultiLabelDataset,
    spec: &ClassifierSpec,
    folds: &FoldAssignment,
    resample_step: Option<&ResampleStep>,
    run_seed: u64,
) -> Result<CrossvalOutput> {
    let x = &ds.require_features()?.data;
    let (m, q) = (ds.len(), ds.num_labels());
    if folds.fold_of.len() != m {
        return Err(Error::shape("fold assignment does not cover the dataset"));
    }
    let fold_scores = (0..folds.k)
        .into_par_iter()
        .map(|f| -> Result<(Vec<usize>, Matrix)> {
            let test = folds.test_indices(f);
            let mut train_ds = ds.subset(&folds.train_indices(f));
            if let Some(step) = resample_step {
                let cfg = ResampleConfig {
                    seed: derive_seed(run_seed ^ step.config.seed, &format!("resample/fold{f}")),
                    ..step.config
                };
                train_ds = resample::apply(step.method, &train_ds, &cfg)?;
                let test_ids: HashSet<&str> = test.iter().map(|&i| ds.ids()[i].as_str()).collect();
                assert!(
                    train_ds.ids().iter().all(|id| !test_ids.contains(id.as_str())),
                    "resampled training fold shares ids with the test fold"
                );
            }
            let model = train(&fold_spec(spec, run_seed, f), &train_ds)?;
            Ok((test.clone(), model.predict_scores(&x.select_rows(&test))?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut scores = Matrix::zeros(m, q);
    for (idx, s) in &fold_scores {
        for (r, &i) in idx.iter().enumerate() {
            scores.row_mut(i).copy_from_slice(s.row(r));
        }
    }
    let preds = LabelMatrix::from_scores(&scores, 0.5);
    let report = evaluate_folds(name, ds.labels(), ds.label_space(), folds, &scores, &preds)?;
    Ok(CrossvalOutput { report, scores, preds })
}
