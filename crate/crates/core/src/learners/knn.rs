use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

impl KnnParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::param("knn k must be at least 1"));
        }
        Ok(())
    }
}

/// Fraction of positive labels among the given neighbour rows.
pub fn positive_fraction(y: &[bool], neighbours: &[usize]) -> f64 {
    if neighbours.is_empty() {
        return 0.0;
    }
    neighbours.iter().filter(|&&i| y[i]).count() as f64 / neighbours.len() as f64
}
