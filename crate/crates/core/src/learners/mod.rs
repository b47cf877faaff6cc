//! Multi-label classifiers. Binary Relevance wraps an MLP, CART tree or kNN
//! base learner; ML-kNN is the native multi-label alternative. Every model
//! emits an `m x q` score matrix with entries in `[0, 1]`.

pub mod br;
pub mod knn;
pub mod mlknn;
pub mod mlp;
pub mod tree;

pub use br::{br_train, BaseLearnerSpec, BinaryLearner, BinaryRelevanceModel};
pub use knn::KnnParams;
pub use mlknn::{mlknn_train, MlknnModel, MlknnParams};
pub use mlp::{mlp_binary_train, MlpModel, MlpParams};
pub use tree::{tree_binary_train, TreeModel, TreeParams};

use serde::{Deserialize, Serialize};

use crate::dataset::{LabelSpace, MultiLabelDataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A complete classifier configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "snake_case")]
pub enum ClassifierSpec {
    BrMlp(MlpParams),
    BrDt(TreeParams),
    BrKnn(KnnParams),
    Mlknn(MlknnParams),
}

impl ClassifierSpec {
    /// Short name used in classifier ids, e.g. `BR_MLP`.
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierSpec::BrMlp(_) => "BR_MLP",
            ClassifierSpec::BrDt(_) => "BR_DT",
            ClassifierSpec::BrKnn(_) => "BR_KNN",
            ClassifierSpec::Mlknn(_) => "MLkNN",
        }
    }

    pub fn base(&self) -> Option<BaseLearnerSpec> {
        match *self {
            ClassifierSpec::BrMlp(p) => Some(BaseLearnerSpec::Mlp(p)),
            ClassifierSpec::BrDt(p) => Some(BaseLearnerSpec::DecisionTree(p)),
            ClassifierSpec::BrKnn(p) => Some(BaseLearnerSpec::Knn(p)),
            ClassifierSpec::Mlknn(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ClassifierSpec::Mlknn(p) => p.validate(),
            other => other.base().expect("BR variant").validate(),
        }
    }

    /// Same spec with the MLP seed replaced; other learners are unseeded.
    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            ClassifierSpec::BrMlp(p) => ClassifierSpec::BrMlp(MlpParams { seed, ..p }),
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedClassifier {
    BinaryRelevance(BinaryRelevanceModel),
    Mlknn { label_space: LabelSpace, model: MlknnModel },
}

pub fn train(spec: &ClassifierSpec, ds: &MultiLabelDataset) -> Result<TrainedClassifier> {
    let x = &ds.require_features()?.data;
    train_on(spec, x, ds)
}

fn train_on(spec: &ClassifierSpec, x: &Matrix, ds: &MultiLabelDataset) -> Result<TrainedClassifier> {
    spec.validate()?;
    match spec {
        ClassifierSpec::Mlknn(p) => Ok(TrainedClassifier::Mlknn {
            label_space: ds.label_space().clone(),
            model: mlknn_train(x, ds.labels(), p)?,
        }),
        other => Ok(TrainedClassifier::BinaryRelevance(br_train(
            x,
            ds.labels(),
            ds.label_space(),
            &other.base().expect("BR variant"),
        )?)),
    }
}

impl TrainedClassifier {
    pub fn label_space(&self) -> &LabelSpace {
        match self {
            TrainedClassifier::BinaryRelevance(m) => &m.label_space,
            TrainedClassifier::Mlknn { label_space, .. } => label_space,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            TrainedClassifier::BinaryRelevance(m) => m.inputs,
            TrainedClassifier::Mlknn { model, .. } => model.x.cols(),
        }
    }

    /// `m x q` scores in `[0, 1]`.
    pub fn predict_scores(&self, x: &Matrix) -> Result<Matrix> {
        let scores = match self {
            TrainedClassifier::BinaryRelevance(m) => m.predict_scores(x)?,
            TrainedClassifier::Mlknn { model, .. } => {
                let mut out = Matrix::zeros(0, 0);
                for row in x.iter_rows() {
                    out.push_row(&model.predict(row)?.0)?;
                }
                if x.rows() == 0 {
                    out = Matrix::zeros(0, model.num_labels());
                }
                out
            }
        };
        if !scores.is_finite() {
            return Err(Error::Numeric("classifier produced a non-finite score".into()));
        }
        Ok(scores)
    }
}
