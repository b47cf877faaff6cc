//! TOML run configuration.
//!
//! Relative paths are resolved against the directory holding the config
//! file. `GENREFUSE_OUTPUT_DIR` replaces `output_dir` when set.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use genrefuse_core::eval::ResampleStep;
use genrefuse_core::frames::FrameScheme;
use genrefuse_core::fusion::{FusionRule, InputKind};
use genrefuse_core::projection::DEFAULT_OUTPUT_DIM;
use genrefuse_core::resample::{ResampleConfig, ResampleMethod};
use genrefuse_core::ClassifierSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const OUTPUT_DIR_ENV: &str = "GENREFUSE_OUTPUT_DIR";
pub const THREADS_ENV: &str = "GENREFUSE_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifest: PathBuf,
    pub seed: u64,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub features: Vec<FeatureSpec>,
    #[serde(default)]
    pub classifiers: Vec<ClassifierSpec>,
    #[serde(default)]
    pub resample: Option<ResampleSection>,
    #[serde(default)]
    pub fusion: Vec<FusionSpec>,
}

fn default_folds() -> usize {
    5
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_lbp_k() -> usize {
    512
}

fn default_rgb_k() -> usize {
    1024
}

fn default_max_iters() -> usize {
    genrefuse_core::frames::kmeans::DEFAULT_MAX_ITERS
}

fn default_ngram() -> usize {
    1
}

fn default_projection_dim() -> usize {
    DEFAULT_OUTPUT_DIM
}

/// One feature set: a native extractor or an external CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FeatureSpec {
    TrailerLbp {
        #[serde(default = "default_lbp_k")]
        codebook_k: usize,
        #[serde(default = "default_max_iters")]
        max_iters: usize,
    },
    TrailerRgb {
        #[serde(default = "default_rgb_k")]
        codebook_k: usize,
        #[serde(default = "default_max_iters")]
        max_iters: usize,
    },
    AudioMfcc,
    AudioSsd,
    AudioSpecLbp,
    PosterLbp,
    PosterRgb,
    SubTfidf {
        #[serde(default = "default_ngram")]
        n: usize,
        #[serde(default = "default_projection_dim")]
        projection_dim: usize,
    },
    SynTfidf {
        #[serde(default = "default_ngram")]
        n: usize,
        #[serde(default = "default_projection_dim")]
        projection_dim: usize,
    },
    External {
        descriptor: String,
        path: PathBuf,
    },
}

impl FeatureSpec {
    /// Descriptor name of the produced feature matrix, e.g. `AUDIO-SSD` or
    /// `SUB-TFIDF-2-CS128`.
    pub fn descriptor(&self) -> String {
        match self {
            FeatureSpec::TrailerLbp { .. } => "TRAILER-LBP".into(),
            FeatureSpec::TrailerRgb { .. } => "TRAILER-RGB".into(),
            FeatureSpec::AudioMfcc => "AUDIO-MFCC".into(),
            FeatureSpec::AudioSsd => "AUDIO-SSD".into(),
            FeatureSpec::AudioSpecLbp => "AUDIO-SPEC-LBP".into(),
            FeatureSpec::PosterLbp => "POSTER-LBP".into(),
            FeatureSpec::PosterRgb => "POSTER-RGB".into(),
            FeatureSpec::SubTfidf { n, projection_dim } => format!("SUB-TFIDF-{n}-CS{projection_dim}"),
            FeatureSpec::SynTfidf { n, projection_dim } => format!("SYN-TFIDF-{n}-CS{projection_dim}"),
            FeatureSpec::External { descriptor, .. } => descriptor.clone(),
        }
    }

    pub fn frame_scheme(&self) -> Option<FrameScheme> {
        match self {
            FeatureSpec::TrailerLbp { .. } | FeatureSpec::PosterLbp => Some(FrameScheme::Lbp),
            FeatureSpec::TrailerRgb { .. } | FeatureSpec::PosterRgb => Some(FrameScheme::Rgb),
            _ => None,
        }
    }
}

/// `[resample]`: the method plus the resampling parameters in one table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResampleSection {
    pub method: ResampleMethod,
    #[serde(flatten)]
    pub config: ResampleConfig,
}

impl ResampleSection {
    pub fn step(&self) -> Option<ResampleStep> {
        (self.method != ResampleMethod::None).then_some(ResampleStep {
            method: self.method,
            config: self.config,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    TopN,
    BestOnData,
    Explicit,
}

/// A fusion plan. Members are chosen by TOP-N, BEST-ON-DATA or listed
/// explicitly as classifier ids (`DESCRIPTOR/LEARNER`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionSpec {
    pub select: Selection,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub members: Option<Vec<String>>,
    pub rule: FusionRule,
    pub input: InputKind,
    #[serde(default)]
    pub threshold: Option<f64>,
}

impl FusionSpec {
    pub fn selection_label(&self) -> String {
        match self.select {
            Selection::TopN => format!("TOP-{}", self.n.unwrap_or(0)),
            Selection::BestOnData => "BEST-ON-DATA".into(),
            Selection::Explicit => "EXPLICIT".into(),
        }
    }

    fn validate(&self) -> CliResult<()> {
        match (self.select, self.n, &self.members) {
            (Selection::TopN, Some(n), None) if n >= 2 => Ok(()),
            (Selection::TopN, _, _) => Err(CliError::config("top_n fusion needs `n` >= 2 and no `members`")),
            (Selection::BestOnData, None, None) => Ok(()),
            (Selection::BestOnData, _, _) => Err(CliError::config("best_on_data fusion takes neither `n` nor `members`")),
            (Selection::Explicit, None, Some(m)) if m.len() >= 2 => Ok(()),
            (Selection::Explicit, _, _) => Err(CliError::config("explicit fusion needs at least 2 `members` and no `n`")),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    /// Reads, resolves and validates a config file, applying the output
    /// directory override from the environment.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            cfg.output_dir = PathBuf::from(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base.join(p) };
        self.manifest = join(&self.manifest);
        self.output_dir = join(&self.output_dir);
        for f in &mut self.features {
            if let FeatureSpec::External { path, .. } = f {
                *path = join(path);
            }
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.folds < 2 {
            return Err(CliError::config(format!("folds must be at least 2, got {}", self.folds)));
        }
        let mut seen = HashSet::new();
        for f in &self.features {
            let d = f.descriptor();
            if !seen.insert(d.clone()) {
                return Err(CliError::config(format!("descriptor {d} is configured twice")));
            }
            match f {
                FeatureSpec::TrailerLbp { codebook_k, .. } | FeatureSpec::TrailerRgb { codebook_k, .. }
                    if *codebook_k == 0 =>
                {
                    return Err(CliError::config(format!("{d}: codebook_k must be at least 1")));
                }
                FeatureSpec::SubTfidf { n, projection_dim } | FeatureSpec::SynTfidf { n, projection_dim }
                    if !(1..=genrefuse_core::text::tfidf::MAX_NGRAM).contains(n) || *projection_dim == 0 =>
                {
                    return Err(CliError::config(format!(
                        "{d}: n must be in 1..={} and projection_dim at least 1",
                        genrefuse_core::text::tfidf::MAX_NGRAM
                    )));
                }
                FeatureSpec::External { descriptor, .. } if descriptor.trim().is_empty() => {
                    return Err(CliError::config("external feature needs a descriptor name"));
                }
                _ => {}
            }
        }
        let mut learners = HashSet::new();
        for c in &self.classifiers {
            c.validate().map_err(|e| CliError::config(e.to_string()))?;
            if !learners.insert(c.name()) {
                return Err(CliError::config(format!("classifier {} is configured twice", c.name())));
            }
        }
        if let Some(r) = &self.resample {
            r.config.validate().map_err(|e| CliError::config(e.to_string()))?;
        }
        for f in &self.fusion {
            f.validate()?;
        }
        Ok(())
    }
}
