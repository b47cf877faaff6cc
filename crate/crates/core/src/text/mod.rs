//! Subtitle/synopsis text: markup stripping, stemming and n-gram TF-IDF.

pub mod porter;
pub mod srt;
pub mod tfidf;

pub use srt::strip_subtitle_markup;
pub use tfidf::{ngram_key_hash, tfidf_fit, tfidf_transform, SparseVector, TfidfModel};

/// Lowercases, splits on runs of non-alphanumeric characters and stems.
pub fn preprocess(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(porter::stem)
        .collect()
}
