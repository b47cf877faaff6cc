//! Versioned JSON artifacts and atomic file writes.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::FORMAT_VERSION;

/// Envelope for every JSON artifact: which stage produced it, for which
/// descriptor, with which seed, and in which format version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact<T> {
    pub format_version: u32,
    pub stage: String,
    pub descriptor: String,
    pub seed: u64,
    pub payload: T,
}

impl<T> Artifact<T> {
    pub fn new(stage: impl Into<String>, descriptor: impl Into<String>, seed: u64, payload: T) -> Self {
        Artifact {
            format_version: FORMAT_VERSION,
            stage: stage.into(),
            descriptor: descriptor.into(),
            seed,
            payload,
        }
    }
}

impl<T: Serialize> Artifact<T> {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Malformed {
            what: "artifact",
            detail: e.to_string(),
        })?;
        s.push('\n');
        Ok(s)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }
}

impl<T: DeserializeOwned> Artifact<T> {
    /// Parses an artifact, refusing any format version other than the current one.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Malformed {
            what: "artifact",
            detail: e.to_string(),
        })?;
        let found = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::Malformed {
                what: "artifact",
                detail: "missing format_version".into(),
            })?;
        if found != u64::from(FORMAT_VERSION) {
            return Err(Error::Version {
                expected: FORMAT_VERSION,
                found: u32::try_from(found).unwrap_or(u32::MAX),
            });
        }
        serde_json::from_value(value).map_err(|e| Error::Malformed {
            what: "artifact",
            detail: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Writes `bytes` to a temporary sibling file, then renames it over `path`.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let file_name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{file_name}.tmp-{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
