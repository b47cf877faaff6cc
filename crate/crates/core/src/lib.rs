//! Multimodal multi-label genre classification.
//!
//! The crate covers the full handcrafted pipeline: per-modality feature
//! extraction (trailer frames, trailer audio, posters, subtitles and
//! synopses), random projection of sparse text vectors, multi-label
//! resampling, Binary Relevance and ML-kNN classifiers, late fusion of score
//! matrices and multi-label evaluation under k-fold cross-validation.
//!
//! Deep representations are not computed here; they enter the pipeline as
//! precomputed feature or score files (see [`dataset::csv_io`]).

pub mod audio;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod frames;
pub mod fusion;
pub mod learners;
pub mod matrix;
pub mod neighbors;
pub mod persist;
pub mod projection;
pub mod resample;
pub mod seed;
pub mod text;

pub use dataset::{FeatureMatrix, FoldAssignment, Indicators, LabelSpace, MultiLabelDataset};
pub use error::{Error, ErrorKind, Result};
pub use eval::EvaluationReport;
pub use learners::{ClassifierSpec, TrainedClassifier};
pub use matrix::{LabelMatrix, Matrix};

/// Format version stamped into every JSON artifact written by this crate.
pub const FORMAT_VERSION: u32 = 1;
