//! Trained-model files: a versioned JSON artifact holding the full model at
//! full float precision.

use std::path::Path;

use genrefuse_core::persist::Artifact;
use genrefuse_core::{Result, TrainedClassifier};

pub const MODEL_STAGE: &str = "train";

pub fn save_model(path: &Path, model: &TrainedClassifier, descriptor: &str, seed: u64) -> Result<()> {
    Artifact::new(MODEL_STAGE, descriptor, seed, model).save(path)
}

/// Loads a model file, refusing other format versions.
pub fn load_model(path: &Path) -> Result<Artifact<TrainedClassifier>> {
    Artifact::load(path)
}
