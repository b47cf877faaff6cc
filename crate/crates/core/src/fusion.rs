//! Late fusion of per-classifier score matrices and the two member
//! selection strategies (best N overall, best per data source).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{LabelMatrix, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionRule {
    Sum,
    Mean,
    Max,
    Prod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    /// Member scores in `[0, 1]`.
    Proba,
    /// Member predictions (scores thresholded at 0.5) as 0/1 values.
    Pred,
}

impl fmt::Display for FusionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FusionRule::Sum => "Sum",
            FusionRule::Mean => "Mean",
            FusionRule::Max => "Max",
            FusionRule::Prod => "Prod",
        })
    }
}

/// Default qualification threshold for `members` inputs.
pub fn default_threshold(rule: FusionRule, kind: InputKind, members: usize) -> f64 {
    match (kind, rule) {
        (InputKind::Proba, FusionRule::Prod) => 0.01,
        (InputKind::Proba, _) => 0.3,
        (InputKind::Pred, FusionRule::Sum) => members.div_ceil(2) as f64,
        (InputKind::Pred, _) => 0.5,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionPlan {
    pub rule: FusionRule,
    pub input_kind: InputKind,
    pub threshold: f64,
    pub members: Vec<String>,
}

impl FusionPlan {
    pub fn new(rule: FusionRule, input_kind: InputKind, members: Vec<String>) -> Self {
        let threshold = default_threshold(rule, input_kind, members.len());
        FusionPlan { rule, input_kind, threshold, members }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.members.len() < 2 {
            return Err(Error::param(format!(
                "fusion needs at least 2 members, got {}",
                self.members.len()
            )));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(Error::param("fusion threshold must be positive"));
        }
        Ok(())
    }

    /// Display label such as `Proba_Mean` or `Pred_Sum`.
    pub fn label(&self) -> String {
        let kind = match self.input_kind {
            InputKind::Proba => "Proba",
            InputKind::Pred => "Pred",
        };
        format!("{kind}_{}", self.rule)
    }
}

/// Converts a member score matrix into the plan's input representation.
pub fn member_input(scores: &Matrix, kind: InputKind) -> Matrix {
    match kind {
        InputKind::Proba => scores.clone(),
        InputKind::Pred => LabelMatrix::from_scores(scores, 0.5).to_f64(),
    }
}

/// Element-wise combination; predictions are `fused >= threshold`.
pub fn fuse(members: &[&Matrix], rule: FusionRule, threshold: f64) -> Result<(Matrix, LabelMatrix)> {
    let first = members
        .first()
        .ok_or_else(|| Error::param("fusion over an empty member list"))?;
    for m in members {
        if m.shape() != first.shape() {
            return Err(Error::shape(format!(
                "fusion members differ in shape: {:?} vs {:?}",
                first.shape(),
                m.shape()
            )));
        }
    }
    let n = members.len() as f64;
    let data: Vec<f64> = (0..first.as_slice().len())
        .map(|e| {
            let vals = members.iter().map(|m| m.as_slice()[e]);
            match rule {
                FusionRule::Sum => vals.sum(),
                FusionRule::Mean => vals.sum::<f64>() / n,
                FusionRule::Max => vals.fold(f64::NEG_INFINITY, f64::max),
                FusionRule::Prod => vals.product(),
            }
        })
        .collect();
    let fused = Matrix::from_vec(first.rows(), first.cols(), data)?;
    let preds = LabelMatrix::from_scores(&fused, threshold);
    Ok((fused, preds))
}

/// Fuses with a validated plan, converting members to the plan's input kind.
pub fn fuse_plan(plan: &FusionPlan, members: &[&Matrix]) -> Result<(Matrix, LabelMatrix)> {
    plan.validate()?;
    if members.len() != plan.members.len() {
        return Err(Error::param("member matrices do not match the plan's member list"));
    }
    let inputs: Vec<Matrix> = members.iter().map(|m| member_input(m, plan.input_kind)).collect();
    let refs: Vec<&Matrix> = inputs.iter().collect();
    fuse(&refs, plan.rule, plan.threshold)
}

/// Modality a classifier's input came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataSource {
    TrailerFrames,
    TrailerAudio,
    Poster,
    Subtitle,
    Synopsis,
}

impl DataSource {
    pub const ALL: [DataSource; 5] = [
        DataSource::TrailerFrames,
        DataSource::TrailerAudio,
        DataSource::Poster,
        DataSource::Subtitle,
        DataSource::Synopsis,
    ];

    /// Source of a descriptor from its name prefix (`TRAILER-`, `AUDIO-`,
    /// `POSTER-`, `SUB-`, `SYN-`).
    pub fn from_descriptor(name: &str) -> Option<DataSource> {
        let upper = name.to_ascii_uppercase();
        [
            ("TRAILER-", DataSource::TrailerFrames),
            ("AUDIO-", DataSource::TrailerAudio),
            ("POSTER-", DataSource::Poster),
            ("SUB-", DataSource::Subtitle),
            ("SYN-", DataSource::Synopsis),
        ]
        .into_iter()
        .find(|(p, _)| upper.starts_with(p))
        .map(|(_, s)| s)
    }
}

/// A classifier's cross-validated F-Scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierResult {
    pub id: String,
    pub source: DataSource,
    pub fold_fscores: Vec<f64>,
}

impl ClassifierResult {
    pub fn new(id: impl Into<String>, source: DataSource, fold_fscores: Vec<f64>) -> Self {
        ClassifierResult { id: id.into(), source, fold_fscores }
    }

    pub fn mean_fscore(&self) -> f64 {
        if self.fold_fscores.is_empty() {
            return 0.0;
        }
        self.fold_fscores.iter().sum::<f64>() / self.fold_fscores.len() as f64
    }
}

/// Higher mean F first; equal means fall back to the smaller id.
fn rank(a: &ClassifierResult, b: &ClassifierResult) -> Ordering {
    b.mean_fscore().total_cmp(&a.mean_fscore()).then_with(|| a.id.cmp(&b.id))
}

pub fn top_n_select(results: &[ClassifierResult], n: usize) -> Result<Vec<String>> {
    if n > results.len() {
        return Err(Error::param(format!(
            "TOP-{n} requested but only {} classifiers are available",
            results.len()
        )));
    }
    let mut sorted: Vec<&ClassifierResult> = results.iter().collect();
    sorted.sort_by(|a, b| rank(a, b));
    Ok(sorted.into_iter().take(n).map(|r| r.id.clone()).collect())
}

/// The best classifier of each of the five sources, in source order.
pub fn best_on_data_select(results: &[ClassifierResult]) -> Result<Vec<String>> {
    let mut groups: BTreeMap<DataSource, Vec<&ClassifierResult>> = BTreeMap::new();
    for r in results {
        groups.entry(r.source).or_default().push(r);
    }
    DataSource::ALL
        .iter()
        .map(|src| {
            let group = groups.get(src).ok_or_else(|| {
                Error::InvalidDataset(format!("no classifier results for data source {src:?}"))
            })?;
            let best = group.iter().min_by(|a, b| rank(a, b)).expect("groups are non-empty");
            Ok(best.id.clone())
        })
        .collect()
}
