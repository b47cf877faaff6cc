//! Binary Relevance: one independent binary learner per label.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::knn::{positive_fraction, KnnParams};
use super::mlp::{mlp_binary_train, MlpModel, MlpParams};
use super::tree::{tree_binary_train, TreeModel, TreeParams};
use crate::dataset::LabelSpace;
use crate::error::{Error, Result};
use crate::matrix::{LabelMatrix, Matrix};
use crate::neighbors::k_nearest;
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseLearnerSpec {
    Mlp(MlpParams),
    DecisionTree(TreeParams),
    Knn(KnnParams),
}

impl BaseLearnerSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            BaseLearnerSpec::Mlp(p) => p.validate(),
            BaseLearnerSpec::DecisionTree(p) => p.validate(),
            BaseLearnerSpec::Knn(p) => p.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "snake_case")]
pub enum BinaryLearner {
    /// Used when the training column has a single value.
    Constant { score: f64 },
    Mlp(MlpModel),
    Tree(TreeModel),
    /// Reference points live once on the model; this keeps the column.
    Knn { k: usize, y: Vec<bool> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryRelevanceModel {
    pub spec: BaseLearnerSpec,
    pub label_space: LabelSpace,
    pub inputs: usize,
    pub learners: Vec<BinaryLearner>,
    /// Training features, kept only for the kNN base learner.
    pub reference: Option<Matrix>,
}

fn train_one(x: &Matrix, y: &[bool], spec: &BaseLearnerSpec, seed: u64) -> Result<BinaryLearner> {
    let pos = y.iter().filter(|&&b| b).count();
    if pos == 0 || pos == y.len() {
        return Ok(BinaryLearner::Constant { score: if pos == 0 { 0.0 } else { 1.0 } });
    }
    Ok(match spec {
        BaseLearnerSpec::Mlp(p) => BinaryLearner::Mlp(mlp_binary_train(x, y, p, seed)?),
        BaseLearnerSpec::DecisionTree(p) => BinaryLearner::Tree(tree_binary_train(x, y, p)?),
        BaseLearnerSpec::Knn(p) => BinaryLearner::Knn { k: p.k, y: y.to_vec() },
    })
}

/// Each label's learner is seeded from the base seed and the label's name,
/// so dropping a label leaves every other learner bit-identical.
pub fn br_train(x: &Matrix, y: &LabelMatrix, label_space: &LabelSpace, spec: &BaseLearnerSpec) -> Result<BinaryRelevanceModel> {
    spec.validate()?;
    if x.rows() != y.rows() {
        return Err(Error::shape(format!("{} feature rows but {} label rows", x.rows(), y.rows())));
    }
    if y.cols() != label_space.len() {
        return Err(Error::shape("label matrix and label space disagree"));
    }
    if x.rows() == 0 {
        return Err(Error::InvalidDataset("empty training set".into()));
    }
    let base_seed = match spec {
        BaseLearnerSpec::Mlp(p) => p.seed,
        _ => 0,
    };
    let learners = label_space
        .names()
        .par_iter()
        .enumerate()
        .map(|(l, name)| train_one(x, &y.column(l), spec, derive_seed(base_seed, &format!("br/{name}"))))
        .collect::<Result<Vec<_>>>()?;
    let reference = matches!(spec, BaseLearnerSpec::Knn(_)).then(|| x.clone());
    Ok(BinaryRelevanceModel {
        spec: *spec,
        label_space: label_space.clone(),
        inputs: x.cols(),
        learners,
        reference,
    })
}

impl BinaryRelevanceModel {
    pub fn predict_row(&self, row: &[f64]) -> Vec<f64> {
        let mut cache: Option<(usize, Vec<usize>)> = None;
        self.learners
            .iter()
            .map(|l| match l {
                BinaryLearner::Constant { score } => *score,
                BinaryLearner::Mlp(m) => m.predict_proba(row),
                BinaryLearner::Tree(t) => t.predict_proba(row),
                BinaryLearner::Knn { k, y } => {
                    let reference = self.reference.as_ref().expect("kNN model keeps its reference points");
                    if cache.as_ref().map_or(true, |(ck, _)| ck != k) {
                        cache = Some((*k, k_nearest(reference, row, *k, None)));
                    }
                    positive_fraction(y, &cache.as_ref().expect("just filled").1)
                }
            })
            .collect()
    }

    pub fn predict_scores(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.inputs {
            return Err(Error::shape(format!(
                "model expects {} features, got {}",
                self.inputs,
                x.cols()
            )));
        }
        let rows: Vec<Vec<f64>> = (0..x.rows()).into_par_iter().map(|i| self.predict_row(x.row(i))).collect();
        let mut out = Matrix::zeros(0, 0);
        for r in &rows {
            out.push_row(r)?;
        }
        if rows.is_empty() {
            out = Matrix::zeros(0, self.learners.len());
        }
        Ok(out)
    }
}
