//! Multi-label metrics. Every 0/0 ratio is taken as 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{LabelMatrix, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    Micro,
    Macro,
    Samples,
}

fn check_shape(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::shape(format!("metric inputs differ in shape: {a:?} vs {b:?}")));
    }
    Ok(())
}

fn f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    let den = 2 * tp + fp + fn_;
    if den == 0 {
        0.0
    } else {
        (2 * tp) as f64 / den as f64
    }
}

/// (tp, fp, fn) for one label column.
fn label_counts(t: &LabelMatrix, p: &LabelMatrix, l: usize) -> (usize, usize, usize) {
    let mut c = (0, 0, 0);
    for i in 0..t.rows() {
        match (t.get(i, l), p.get(i, l)) {
            (true, true) => c.0 += 1,
            (false, true) => c.1 += 1,
            (true, false) => c.2 += 1,
            _ => {}
        }
    }
    c
}

pub fn fscore(y_true: &LabelMatrix, y_pred: &LabelMatrix, avg: Averaging) -> Result<f64> {
    check_shape(y_true.shape(), y_pred.shape())?;
    let (m, q) = y_true.shape();
    Ok(match avg {
        Averaging::Micro => {
            let (mut tp, mut fp, mut fn_) = (0, 0, 0);
            for l in 0..q {
                let c = label_counts(y_true, y_pred, l);
                tp += c.0;
                fp += c.1;
                fn_ += c.2;
            }
            f1(tp, fp, fn_)
        }
        Averaging::Macro => {
            if q == 0 {
                return Ok(0.0);
            }
            (0..q)
                .map(|l| {
                    let (tp, fp, fn_) = label_counts(y_true, y_pred, l);
                    f1(tp, fp, fn_)
                })
                .sum::<f64>()
                / q as f64
        }
        Averaging::Samples => {
            if m == 0 {
                return Ok(0.0);
            }
            (0..m)
                .map(|i| {
                    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
                    for (t, p) in y_true.row(i).iter().zip(y_pred.row(i)) {
                        match (t, p) {
                            (true, true) => tp += 1,
                            (false, true) => fp += 1,
                            (true, false) => fn_ += 1,
                            _ => {}
                        }
                    }
                    f1(tp, fp, fn_)
                })
                .sum::<f64>()
                / m as f64
        }
    })
}

/// Macro F over labels with at least one positive in `y_true`; also returns
/// the excluded label indices.
pub fn fscore_macro_present(y_true: &LabelMatrix, y_pred: &LabelMatrix) -> Result<(f64, Vec<usize>)> {
    check_shape(y_true.shape(), y_pred.shape())?;
    let mut excluded = Vec::new();
    let mut sum = 0.0;
    let mut n = 0;
    for l in 0..y_true.cols() {
        if y_true.column_count(l) == 0 {
            excluded.push(l);
            continue;
        }
        let (tp, fp, fn_) = label_counts(y_true, y_pred, l);
        sum += f1(tp, fp, fn_);
        n += 1;
    }
    Ok((if n == 0 { 0.0 } else { sum / n as f64 }, excluded))
}

/// One point per distinct score, highest threshold first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Precision/recall at every distinct score threshold (predict `score >= t`).
/// `None` when the label has no positives.
pub fn pr_curve(truth: &[bool], scores: &[f64]) -> Option<Vec<PrPoint>> {
    let positives = truth.iter().filter(|&&b| b).count();
    if positives == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut points = Vec::new();
    let (mut tp, mut seen) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let t = scores[order[i]];
        while i < order.len() && scores[order[i]] == t {
            tp += usize::from(truth[order[i]]);
            seen += 1;
            i += 1;
        }
        points.push(PrPoint {
            threshold: t,
            precision: tp as f64 / seen as f64,
            recall: tp as f64 / positives as f64,
        });
    }
    Some(points)
}

/// Average precision: `Σ (R_i - R_{i-1}) P_i` over the PR curve.
pub fn average_precision(truth: &[bool], scores: &[f64]) -> Option<f64> {
    let curve = pr_curve(truth, scores)?;
    let mut prev_r = 0.0;
    let mut ap = 0.0;
    for p in curve {
        ap += (p.recall - prev_r) * p.precision;
        prev_r = p.recall;
    }
    Some(ap)
}

/// Macro AP over labels with a positive; also returns skipped label indices.
pub fn auc_pr(y_true: &LabelMatrix, scores: &Matrix) -> Result<(f64, Vec<usize>)> {
    check_shape(y_true.shape(), scores.shape())?;
    if !scores.is_finite() {
        return Err(Error::Numeric("non-finite score in AUC-PR input".into()));
    }
    let mut skipped = Vec::new();
    let mut aps = Vec::new();
    for l in 0..y_true.cols() {
        let col: Vec<f64> = (0..scores.rows()).map(|i| scores.get(i, l)).collect();
        match average_precision(&y_true.column(l), &col) {
            Some(ap) => aps.push(ap),
            None => skipped.push(l),
        }
    }
    if aps.is_empty() {
        return Err(Error::InvalidDataset("AUC-PR: no label has a positive example".into()));
    }
    Ok((aps.iter().sum::<f64>() / aps.len() as f64, skipped))
}

/// TP / (TP + FN) per label; `None` for labels without positives.
pub fn recall_per_label(y_true: &LabelMatrix, y_pred: &LabelMatrix) -> Result<Vec<Option<f64>>> {
    check_shape(y_true.shape(), y_pred.shape())?;
    Ok((0..y_true.cols())
        .map(|l| {
            let (tp, _, fn_) = label_counts(y_true, y_pred, l);
            (tp + fn_ > 0).then(|| tp as f64 / (tp + fn_) as f64)
        })
        .collect())
}
