//! Multi-label data model: label spaces, datasets, dataset indicators,
//! label co-occurrence, manifests and cross-validation folds.

pub mod csv_io;
mod folds;
mod manifest;
mod stats;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

pub use folds::{kfold_split, FoldAssignment};
pub use manifest::{load_manifest, Manifest, ManifestExample};
pub use stats::{cooccurrence, indicators, Indicators};

use crate::error::{Error, Result};
use crate::matrix::{LabelMatrix, Matrix};

/// Ordered, duplicate-free list of label names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct LabelSpace {
    names: Vec<String>,
}

impl LabelSpace {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidDataset("label space is empty".into()));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidDataset(format!("label {n:?} listed twice in label space")));
            }
        }
        Ok(LabelSpace { names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Number of labels, `q`.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn without(&self, col: usize) -> Result<LabelSpace> {
        let mut names = self.names.clone();
        names.remove(col);
        LabelSpace::new(names)
    }
}

impl TryFrom<Vec<String>> for LabelSpace {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        LabelSpace::new(v)
    }
}

impl From<LabelSpace> for Vec<String> {
    fn from(l: LabelSpace) -> Self {
        l.names
    }
}

/// A dense feature matrix tagged with its source/descriptor name
/// (e.g. `AUDIO-SSD`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub descriptor: String,
    pub data: Matrix,
}

impl FeatureMatrix {
    pub fn new(descriptor: impl Into<String>, data: Matrix) -> Self {
        FeatureMatrix {
            descriptor: descriptor.into(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.data.rows()
    }

    pub fn dim(&self) -> usize {
        self.data.cols()
    }
}

/// Training data: ids, a binary label matrix and optionally attached features.
///
/// Every example must carry at least one label; empty label sets only appear
/// in predicted outputs, which are plain [`LabelMatrix`] values.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLabelDataset {
    ids: Vec<String>,
    features: Option<FeatureMatrix>,
    labels: LabelMatrix,
    label_space: LabelSpace,
}

impl MultiLabelDataset {
    pub fn new(ids: Vec<String>, labels: LabelMatrix, label_space: LabelSpace) -> Result<Self> {
        if ids.len() != labels.rows() {
            return Err(Error::shape(format!(
                "{} ids but {} label rows",
                ids.len(),
                labels.rows()
            )));
        }
        if labels.cols() != label_space.len() {
            return Err(Error::shape(format!(
                "label matrix has {} columns, label space has {} labels",
                labels.cols(),
                label_space.len()
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        for (i, row) in labels.iter_rows().enumerate() {
            if !row.iter().any(|&b| b) {
                return Err(Error::InvalidDataset(format!(
                    "training example with no labels: {:?}",
                    ids[i]
                )));
            }
        }
        Ok(MultiLabelDataset {
            ids,
            features: None,
            labels,
            label_space,
        })
    }

    /// Builds a dataset from `(id, label names)` pairs.
    pub fn from_label_sets<I, S>(label_space: LabelSpace, examples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut ids = Vec::new();
        let mut labels = LabelMatrix::zeros(0, label_space.len());
        for (id, names) in examples {
            let mut row = vec![false; label_space.len()];
            for n in names {
                let n = n.as_ref();
                let j = label_space
                    .index_of(n)
                    .ok_or_else(|| Error::UnknownLabel(n.to_string()))?;
                row[j] = true;
            }
            labels.push_row(&row)?;
            ids.push(id);
        }
        MultiLabelDataset::new(ids, labels, label_space)
    }

    pub fn with_features(mut self, features: FeatureMatrix) -> Result<Self> {
        if features.rows() != self.len() {
            return Err(Error::shape(format!(
                "feature matrix has {} rows, dataset has {} examples",
                features.rows(),
                self.len()
            )));
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &LabelMatrix {
        &self.labels
    }

    pub fn label_space(&self) -> &LabelSpace {
        &self.label_space
    }

    pub fn features(&self) -> Option<&FeatureMatrix> {
        self.features.as_ref()
    }

    pub fn require_features(&self) -> Result<&FeatureMatrix> {
        self.features
            .as_ref()
            .ok_or_else(|| Error::InvalidDataset("dataset has no feature matrix attached".into()))
    }

    /// Number of examples, `m`.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn num_labels(&self) -> usize {
        self.label_space.len()
    }

    pub fn id_index(&self) -> HashMap<&str, usize> {
        self.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect()
    }

    /// Sub-dataset of the given rows, in the given order.
    pub fn subset(&self, idx: &[usize]) -> MultiLabelDataset {
        MultiLabelDataset {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            features: self.features.as_ref().map(|f| FeatureMatrix {
                descriptor: f.descriptor.clone(),
                data: f.data.select_rows(idx),
            }),
            labels: self.labels.select_rows(idx),
            label_space: self.label_space.clone(),
        }
    }

    /// Appends examples. Used by the oversampler; ids must stay unique.
    pub(crate) fn append(&mut self, ids: Vec<String>, features: Matrix, labels: LabelMatrix) -> Result<()> {
        let existing = self.require_features()?.dim();
        if features.rows() > 0 && features.cols() != existing {
            return Err(Error::shape("appended features have a different dimension"));
        }
        let taken: HashSet<String> = self.ids.iter().cloned().collect();
        for id in &ids {
            if taken.contains(id) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let f = self.features.as_mut().expect("checked above");
        for i in 0..features.rows() {
            f.data.push_row(features.row(i))?;
            self.labels.push_row(labels.row(i))?;
        }
        self.ids.extend(ids);
        Ok(())
    }
}
