//! Handcrafted visual descriptors for trailer frames and posters:
//! uniform LBP(8,2), RGB histograms, k-means codebooks and bag-of-visual-
//! features histograms.

pub mod color;
pub mod image;
pub mod kmeans;
pub mod lbp;
pub mod select;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use self::color::{rgb_histogram, RGB_BINS};
pub use self::image::{load_rgb, GrayImage, RgbImage};
pub use self::kmeans::{bovf_encode, kmeans_fit, kmeans_fit_traced, Codebook, KmeansFit};
pub use self::lbp::{lbp_u2_8_2, LBP_BINS};
pub use self::select::{select_frames_deep, select_frames_uniform};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Number of frames sampled per trailer for the handcrafted descriptors.
pub const UNIFORM_FRAMES: usize = 555;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameScheme {
    Lbp,
    Rgb,
}

impl FrameScheme {
    pub fn dim(self) -> usize {
        match self {
            FrameScheme::Lbp => LBP_BINS,
            FrameScheme::Rgb => RGB_BINS,
        }
    }
}

/// Per-image descriptor: LBP on the luma image, or the RGB histogram.
pub fn image_descriptor(img: &RgbImage, scheme: FrameScheme) -> Result<Vec<f64>> {
    match scheme {
        FrameScheme::Lbp => lbp_u2_8_2(&img.to_gray()),
        FrameScheme::Rgb => rgb_histogram(img),
    }
}

/// Poster descriptor: the same per-image descriptors on the whole poster.
pub fn poster_descriptor(path: impl AsRef<Path>, scheme: FrameScheme) -> Result<Vec<f64>> {
    image_descriptor(&load_rgb(path)?, scheme)
}

/// Lists `frame_000000.ppm`, `frame_000001.ppm`, ... (or `.png`), which must
/// be numbered contiguously from zero.
pub fn list_frames(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut numbered = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(rest) = name.strip_prefix("frame_") else { continue };
        let Some((num, ext)) = rest.split_once('.') else { continue };
        if !matches!(ext, "ppm" | "png") || num.len() != 6 {
            continue;
        }
        if let Ok(n) = num.parse::<usize>() {
            numbered.push((n, entry.path()));
        }
    }
    numbered.sort();
    for (expected, (n, _)) in numbered.iter().enumerate() {
        if *n != expected {
            return Err(Error::Malformed {
                what: "frame directory",
                detail: format!("{}: frame {expected} missing", dir.display()),
            });
        }
    }
    if numbered.is_empty() {
        return Err(Error::Malformed {
            what: "frame directory",
            detail: format!("{}: no frame_NNNNNN.ppm files", dir.display()),
        });
    }
    Ok(numbered.into_iter().map(|(_, p)| p).collect())
}

/// Descriptors of the `n` uniformly selected frames, one row per selected
/// index (repeated frames are decoded once).
pub fn selected_frame_descriptors(dir: impl AsRef<Path>, scheme: FrameScheme, n: usize) -> Result<Matrix> {
    let frames = list_frames(dir)?;
    let idx = select_frames_uniform(frames.len(), n)?;
    let mut unique = idx.clone();
    unique.dedup();
    let descs: Vec<Vec<f64>> = unique
        .par_iter()
        .map(|&i| load_rgb(&frames[i]).and_then(|img| image_descriptor(&img, scheme)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(idx.len());
    let mut u = 0;
    for &i in &idx {
        while unique[u] != i {
            u += 1;
        }
        rows.push(descs[u].as_slice());
    }
    Matrix::from_rows(&rows)
}

/// Descriptors of the distinct frames among the `n` selected ones; the
/// training set for a codebook.
pub fn distinct_frame_descriptors(dir: impl AsRef<Path>, scheme: FrameScheme, n: usize) -> Result<Matrix> {
    let frames = list_frames(dir)?;
    let mut idx = select_frames_uniform(frames.len(), n)?;
    idx.dedup();
    let descs: Vec<Vec<f64>> = idx
        .par_iter()
        .map(|&i| load_rgb(&frames[i]).and_then(|img| image_descriptor(&img, scheme)))
        .collect::<Result<_>>()?;
    Matrix::from_rows(&descs)
}

/// Bag-of-visual-features histogram of a trailer: 555 uniformly selected
/// frames, per-frame descriptor, nearest-centroid histogram normalised by the
/// number of selected frames.
pub fn trailer_visual_features(frames_dir: impl AsRef<Path>, scheme: FrameScheme, cb: &Codebook) -> Result<Vec<f64>> {
    if cb.d != scheme.dim() {
        return Err(Error::shape(format!(
            "codebook {:?} has dimension {}, {scheme:?} frames produce {}",
            cb.descriptor_name,
            cb.d,
            scheme.dim()
        )));
    }
    let vectors = selected_frame_descriptors(frames_dir, scheme, UNIFORM_FRAMES)?;
    bovf_encode(&vectors, cb)
}
