use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{LabelSpace, MultiLabelDataset};
use crate::error::{Error, Result};

/// One title in a manifest. Resource paths are relative to the manifest file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestExample {
    pub id: String,
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frames_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audio_wav: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poster: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtitle_srt: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synopsis_txt: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub label_space: Vec<String>,
    pub examples: Vec<ManifestExample>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest = Manifest::parse(&text)?;
        manifest.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(manifest)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed {
            what: "manifest",
            detail: e.to_string(),
        })
    }

    /// Resolves a resource path against the manifest's directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn ids(&self) -> Vec<String> {
        self.examples.iter().map(|e| e.id.clone()).collect()
    }

    pub fn to_dataset(&self) -> Result<MultiLabelDataset> {
        let space = LabelSpace::new(self.label_space.iter().cloned())?;
        MultiLabelDataset::from_label_sets(
            space,
            self.examples.iter().map(|e| (e.id.clone(), e.labels.clone())),
        )
    }
}

/// Reads a manifest file into a dataset (no features attached).
pub fn load_manifest(path: impl AsRef<Path>) -> Result<MultiLabelDataset> {
    Manifest::load(path)?.to_dataset()
}
