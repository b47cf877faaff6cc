//! Multi-label resampling: ML-SMOTE oversampling and MLTL cleaning.

mod mlsmote;
mod mltl;

pub use mlsmote::{imbalance_ratios, minority_labels, mlsmote};
pub use mltl::{mltl, tomek_links};

use serde::{Deserialize, Serialize};

use crate::dataset::MultiLabelDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResampleConfig {
    pub resize_rate: f64,
    pub k_neighbors: usize,
    pub mltl_threshold: f64,
    pub seed: u64,
}

impl Default for ResampleConfig {
    fn default() -> Self {
        ResampleConfig { resize_rate: 0.25, k_neighbors: 5, mltl_threshold: 0.5, seed: 0 }
    }
}

impl ResampleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.resize_rate > 0.0 && self.resize_rate <= 1.0) {
            return Err(Error::param(format!("resize_rate must be in (0, 1], got {}", self.resize_rate)));
        }
        if self.k_neighbors == 0 {
            return Err(Error::param("k_neighbors must be at least 1"));
        }
        if !(self.mltl_threshold > 0.0 && self.mltl_threshold <= 1.0) {
            return Err(Error::param(format!(
                "mltl_threshold must be in (0, 1], got {}",
                self.mltl_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleMethod {
    None,
    Mlsmote,
    Mltl,
    MlsmoteMltl,
}

pub fn mlsmote_then_mltl(ds: &MultiLabelDataset, cfg: &ResampleConfig) -> Result<MultiLabelDataset> {
    mltl(&mlsmote(ds, cfg)?, cfg)
}

pub fn apply(method: ResampleMethod, ds: &MultiLabelDataset, cfg: &ResampleConfig) -> Result<MultiLabelDataset> {
    match method {
        ResampleMethod::None => Ok(ds.clone()),
        ResampleMethod::Mlsmote => mlsmote(ds, cfg),
        ResampleMethod::Mltl => mltl(ds, cfg),
        ResampleMethod::MlsmoteMltl => mlsmote_then_mltl(ds, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(ResampleConfig::default().validate().is_ok());
        for bad in [
            ResampleConfig { resize_rate: 0.0, ..Default::default() },
            ResampleConfig { resize_rate: 1.5, ..Default::default() },
            ResampleConfig { k_neighbors: 0, ..Default::default() },
            ResampleConfig { mltl_threshold: 0.0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
