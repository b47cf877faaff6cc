//! Feature extraction for one configured feature set over a manifest.

use std::path::{Path, PathBuf};

use genrefuse_core::audio::{self, load_wav, stft_spectrogram, DEFAULT_HOP, DEFAULT_WINDOW};
use genrefuse_core::dataset::csv_io::ingest_features;
use genrefuse_core::dataset::{Manifest, ManifestExample};
use genrefuse_core::frames::{
    distinct_frame_descriptors, kmeans_fit, poster_descriptor, trailer_visual_features, Codebook, FrameScheme,
    UNIFORM_FRAMES,
};
use genrefuse_core::projection::Projector;
use genrefuse_core::seed::derive_seed;
use genrefuse_core::text::{preprocess, strip_subtitle_markup, tfidf_fit, tfidf_transform, SparseVector, TfidfModel};
use genrefuse_core::{Error, FeatureMatrix, Matrix, Result};
use log::{info, warn};
use rayon::prelude::*;

use crate::config::FeatureSpec;

/// A feature matrix plus whatever was fitted to produce it.
#[derive(Debug, Clone)]
pub struct Extracted {
    pub features: FeatureMatrix,
    pub codebook: Option<Codebook>,
    pub text: Option<TextArtifacts>,
}

#[derive(Debug, Clone)]
pub struct TextArtifacts {
    pub model: TfidfModel,
    pub projector: Projector,
    /// Unprojected TF-IDF vectors in manifest order.
    pub sparse: Vec<SparseVector>,
}

#[derive(Clone, Copy)]
enum Resource {
    Frames,
    Audio,
    Poster,
    Subtitle,
    Synopsis,
}

fn resource(manifest: &Manifest, ex: &ManifestExample, which: Resource) -> Result<PathBuf> {
    let (p, what) = match which {
        Resource::Frames => (&ex.frames_dir, "frames_dir"),
        Resource::Audio => (&ex.audio_wav, "audio_wav"),
        Resource::Poster => (&ex.poster, "poster"),
        Resource::Subtitle => (&ex.subtitle_srt, "subtitle_srt"),
        Resource::Synopsis => (&ex.synopsis_txt, "synopsis_txt"),
    };
    p.as_deref()
        .map(|p| manifest.resolve(p))
        .ok_or_else(|| Error::InvalidDataset(format!("example {:?} has no {what}", ex.id)))
}

fn per_example<F>(manifest: &Manifest, which: Resource, f: F) -> Result<Matrix>
where
    F: Fn(&Path) -> Result<Vec<f64>> + Sync,
{
    let rows: Vec<Vec<f64>> = manifest
        .examples
        .par_iter()
        .map(|ex| f(&resource(manifest, ex, which)?))
        .collect::<Result<_>>()?;
    Matrix::from_rows(&rows)
}

/// Fits the codebook on the distinct selected frames of every trailer, then
/// encodes each trailer. The fit is unsupervised, so it sees all titles.
fn trailer_bovf(
    manifest: &Manifest,
    scheme: FrameScheme,
    descriptor: &str,
    k: usize,
    max_iters: usize,
    seed: u64,
) -> Result<(Matrix, Codebook)> {
    let blocks: Vec<Matrix> = manifest
        .examples
        .par_iter()
        .map(|ex| distinct_frame_descriptors(resource(manifest, ex, Resource::Frames)?, scheme, UNIFORM_FRAMES))
        .collect::<Result<_>>()?;
    let mut pool = Matrix::zeros(0, 0);
    for b in &blocks {
        for row in b.iter_rows() {
            pool.push_row(row)?;
        }
    }
    info!("{descriptor}: fitting {k} centroids on {} frame descriptors", pool.rows());
    let mut cb = kmeans_fit(&pool, k, derive_seed(seed, &format!("codebook/{descriptor}")), max_iters)?;
    cb.descriptor_name = descriptor.to_string();
    let data = per_example(manifest, Resource::Frames, |dir| trailer_visual_features(dir, scheme, &cb))?;
    Ok((data, cb))
}

fn read_text(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

/// TF-IDF over subtitles or synopses, projected to `dim` columns. Like the
/// codebook, the vocabulary and document frequencies come from all titles.
fn text_features(
    manifest: &Manifest,
    which: Resource,
    prefix: &str,
    n: usize,
    dim: usize,
    seed: u64,
) -> Result<(FeatureMatrix, TextArtifacts)> {
    let docs: Vec<Vec<String>> = manifest
        .examples
        .par_iter()
        .map(|ex| {
            let raw = read_text(&resource(manifest, ex, which)?)?;
            let text = match which {
                Resource::Subtitle => strip_subtitle_markup(&raw),
                _ => raw,
            };
            Ok(preprocess(&text))
        })
        .collect::<Result<_>>()?;
    let model = tfidf_fit(&docs, n)?;
    let sparse: Vec<SparseVector> = docs.iter().map(|d| tfidf_transform(d, &model)).collect::<Result<_>>()?;
    let empty = sparse.iter().filter(|v| v.is_zero()).count();
    if empty > 0 {
        warn!("{prefix}-TFIDF-{n}: {empty} documents have no {n}-grams and project to zero");
    }
    let base = format!("{prefix}-TFIDF-{n}");
    let projector = Projector::new(dim, derive_seed(seed, &format!("projection/{base}")))?;
    let features = projector.project_matrix(&base, &sparse);
    Ok((features, TextArtifacts { model, projector, sparse }))
}

/// Produces the feature matrix for `spec`, rows in manifest order.
pub fn extract_feature(spec: &FeatureSpec, manifest: &Manifest, seed: u64) -> Result<Extracted> {
    let descriptor = spec.descriptor();
    let plain = |data: Matrix| Extracted {
        features: FeatureMatrix::new(descriptor.clone(), data),
        codebook: None,
        text: None,
    };
    let out = match spec {
        FeatureSpec::TrailerLbp { codebook_k, max_iters } | FeatureSpec::TrailerRgb { codebook_k, max_iters } => {
            let scheme = spec.frame_scheme().expect("trailer features have a frame scheme");
            let (data, cb) = trailer_bovf(manifest, scheme, &descriptor, *codebook_k, *max_iters, seed)?;
            Extracted {
                codebook: Some(cb),
                ..plain(data)
            }
        }
        FeatureSpec::PosterLbp | FeatureSpec::PosterRgb => {
            let scheme = spec.frame_scheme().expect("poster features have a frame scheme");
            plain(per_example(manifest, Resource::Poster, |p| poster_descriptor(p, scheme))?)
        }
        FeatureSpec::AudioMfcc => plain(per_example(manifest, Resource::Audio, |p| audio::mfcc(&load_wav(p)?))?),
        FeatureSpec::AudioSsd => plain(per_example(manifest, Resource::Audio, |p| {
            audio::ssd(&stft_spectrogram(&load_wav(p)?, DEFAULT_WINDOW, DEFAULT_HOP)?)
        })?),
        FeatureSpec::AudioSpecLbp => {
            plain(per_example(manifest, Resource::Audio, |p| audio::audio_spec_lbp(&load_wav(p)?))?)
        }
        FeatureSpec::SubTfidf { n, projection_dim } => {
            let (features, text) = text_features(manifest, Resource::Subtitle, "SUB", *n, *projection_dim, seed)?;
            Extracted { features, codebook: None, text: Some(text) }
        }
        FeatureSpec::SynTfidf { n, projection_dim } => {
            let (features, text) = text_features(manifest, Resource::Synopsis, "SYN", *n, *projection_dim, seed)?;
            Extracted { features, codebook: None, text: Some(text) }
        }
        FeatureSpec::External { descriptor, path } => Extracted {
            features: ingest_external_features(path, manifest, descriptor)?,
            codebook: None,
            text: None,
        },
    };
    if !out.features.data.is_finite() {
        return Err(Error::Numeric(format!("{descriptor}: extracted features are not finite")));
    }
    Ok(out)
}

/// Loads a precomputed feature CSV and aligns its rows to the manifest by id.
/// The configured descriptor name wins over the one recorded in the file.
pub fn ingest_external_features(path: &Path, manifest: &Manifest, descriptor: &str) -> Result<FeatureMatrix> {
    let mut fm = ingest_features(path, &manifest.ids(), descriptor)?;
    if fm.descriptor != descriptor {
        warn!(
            "{}: file names its descriptor {:?}, using configured name {descriptor:?}",
            path.display(),
            fm.descriptor
        );
        fm.descriptor = descriptor.to_string();
    }
    Ok(fm)
}
