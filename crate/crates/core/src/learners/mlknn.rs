//! ML-kNN: per-label MAP estimate from the label counts of the k nearest
//! training examples, with Laplace-style smoothing `s`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{LabelMatrix, Matrix};
use crate::neighbors::k_nearest;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlknnParams {
    pub k: usize,
    pub s: f64,
}

impl Default for MlknnParams {
    fn default() -> Self {
        MlknnParams { k: 10, s: 1.0 }
    }
}

impl MlknnParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::param("ML-kNN k must be at least 1"));
        }
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::param("ML-kNN smoothing s must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlknnModel {
    pub k: usize,
    pub s: f64,
    pub x: Matrix,
    pub y: LabelMatrix,
    /// P(l) per label.
    pub priors: Vec<f64>,
    /// `cond_pos[l][j]` = P(j of the k neighbours carry l | l).
    pub cond_pos: Vec<Vec<f64>>,
    /// `cond_neg[l][j]` = P(j of the k neighbours carry l | not l).
    pub cond_neg: Vec<Vec<f64>>,
}

fn neighbour_label_counts(y: &LabelMatrix, neighbours: &[usize]) -> Vec<usize> {
    (0..y.cols())
        .map(|l| neighbours.iter().filter(|&&i| y.get(i, l)).count())
        .collect()
}

pub fn mlknn_train(x: &Matrix, y: &LabelMatrix, params: &MlknnParams) -> Result<MlknnModel> {
    params.validate()?;
    let (m, q) = (x.rows(), y.cols());
    if y.rows() != m {
        return Err(Error::shape(format!("{m} feature rows but {} label rows", y.rows())));
    }
    let k = params.k;
    if k >= m {
        return Err(Error::param(format!("ML-kNN needs k < m, got k={k}, m={m}")));
    }
    let s = params.s;
    let mut c_pos = vec![vec![0usize; k + 1]; q];
    let mut c_neg = vec![vec![0usize; k + 1]; q];
    for i in 0..m {
        let nn = k_nearest(x, x.row(i), k, Some(i));
        for (l, c) in neighbour_label_counts(y, &nn).into_iter().enumerate() {
            if y.get(i, l) {
                c_pos[l][c] += 1;
            } else {
                c_neg[l][c] += 1;
            }
        }
    }
    let priors = (0..q)
        .map(|l| (s + y.column_count(l) as f64) / (2.0 * s + m as f64))
        .collect();
    let smooth = |counts: &Vec<usize>| -> Vec<f64> {
        let total: usize = counts.iter().sum();
        let den = s * (k + 1) as f64 + total as f64;
        counts.iter().map(|&c| (s + c as f64) / den).collect()
    };
    Ok(MlknnModel {
        k,
        s,
        x: x.clone(),
        y: y.clone(),
        priors,
        cond_pos: c_pos.iter().map(smooth).collect(),
        cond_neg: c_neg.iter().map(smooth).collect(),
    })
}

impl MlknnModel {
    pub fn num_labels(&self) -> usize {
        self.y.cols()
    }

    /// Posterior scores; predictions are `score >= 0.5`.
    pub fn predict(&self, row: &[f64]) -> Result<(Vec<f64>, Vec<bool>)> {
        if row.len() != self.x.cols() {
            return Err(Error::shape(format!(
                "ML-kNN model expects {} features, got {}",
                self.x.cols(),
                row.len()
            )));
        }
        let nn = k_nearest(&self.x, row, self.k, None);
        let scores: Vec<f64> = neighbour_label_counts(&self.y, &nn)
            .into_iter()
            .enumerate()
            .map(|(l, j)| {
                let p = self.priors[l] * self.cond_pos[l][j];
                let n = (1.0 - self.priors[l]) * self.cond_neg[l][j];
                p / (p + n)
            })
            .collect();
        let preds = scores.iter().map(|&v| v >= 0.5).collect();
        Ok((scores, preds))
    }
}
