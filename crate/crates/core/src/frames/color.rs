use super::image::RgbImage;
use crate::error::{Error, Result};

pub const RGB_BINS: usize = 768;

/// Concatenated R, G and B 256-bin histograms, each normalised by pixel count.
pub fn rgb_histogram(img: &RgbImage) -> Result<Vec<f64>> {
    if img.data.is_empty() {
        return Err(Error::param("rgb histogram of an empty image"));
    }
    let mut counts = vec![0u64; RGB_BINS];
    for px in &img.data {
        for (c, &v) in px.iter().enumerate() {
            counts[c * 256 + v as usize] += 1;
        }
    }
    let n = img.data.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / n).collect())
}
