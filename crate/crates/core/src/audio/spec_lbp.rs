use super::pcm::PcmAudio;
use super::stft::{crop_pad_30s, stft_spectrogram, Spectrogram, DEFAULT_HOP, DEFAULT_WINDOW};
use crate::error::Result;
use crate::frames::image::GrayImage;
use crate::frames::lbp::lbp_u2_8_2;

pub const DYNAMIC_RANGE_DB: f64 = 80.0;
const MAG_FLOOR: f64 = 1e-10;

/// Renders a spectrogram as an 8-bit image: time on x, frequency on y with
/// the highest bin in row 0. Levels are dB relative to the loudest cell,
/// mapped linearly from `-range` (0) to 0 dB (255).
pub fn spectrogram_to_gray(spec: &Spectrogram, range_db: f64) -> GrayImage {
    let width = spec.num_frames();
    let height = spec.num_bins();
    let db: Vec<Vec<f64>> = spec
        .columns
        .iter()
        .map(|c| c.iter().map(|&m| 20.0 * m.max(MAG_FLOOR).log10()).collect())
        .collect();
    let peak = db
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    GrayImage::from_fn(width, height, |x, y| {
        let v = db[x][height - 1 - y];
        let level = ((v - peak) / range_db + 1.0).clamp(0.0, 1.0);
        (level * 255.0 + 0.5).floor() as u8
    })
}

pub fn audio_spec_lbp(audio: &PcmAudio) -> Result<Vec<f64>> {
    let spec = stft_spectrogram(audio, DEFAULT_WINDOW, DEFAULT_HOP)?;
    let image = spectrogram_to_gray(&crop_pad_30s(&spec), DYNAMIC_RANGE_DB);
    lbp_u2_8_2(&image)
}
