use super::pcm::PcmAudio;
use super::stft::{stft_spectrogram, Spectrogram, DEFAULT_HOP, DEFAULT_WINDOW};
use crate::error::Result;

pub const MFCC_FILTERS: usize = 26;
pub const MFCC_COEFFS: usize = 13;
pub const LOG_FLOOR: f64 = 1e-10;

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular mel filters spanning 0 Hz to Nyquist, sampled at each bin's
/// centre frequency. Returns `n_filters` rows of `window/2 + 1` weights.
pub fn mel_filterbank(n_filters: usize, window_size: usize, sample_rate: u32) -> Vec<Vec<f64>> {
    let nyquist = f64::from(sample_rate) / 2.0;
    let top = hz_to_mel(nyquist);
    let edges: Vec<f64> = (0..n_filters + 2)
        .map(|i| mel_to_hz(top * i as f64 / (n_filters + 1) as f64))
        .collect();
    let bins = window_size / 2 + 1;
    let bin_hz = f64::from(sample_rate) / window_size as f64;
    (0..n_filters)
        .map(|m| {
            let (lo, mid, hi) = (edges[m], edges[m + 1], edges[m + 2]);
            (0..bins)
                .map(|b| {
                    let f = b as f64 * bin_hz;
                    if f <= lo || f >= hi {
                        0.0
                    } else if f <= mid {
                        (f - lo) / (mid - lo)
                    } else {
                        (hi - f) / (hi - mid)
                    }
                })
                .collect()
        })
        .collect()
}

/// Orthonormal DCT-II of `x`, first `n_out` coefficients.
pub fn dct2_ortho(x: &[f64], n_out: usize) -> Vec<f64> {
    let n = x.len() as f64;
    (0..n_out)
        .map(|k| {
            let s: f64 = x
                .iter()
                .enumerate()
                .map(|(i, &v)| v * (std::f64::consts::PI * k as f64 * (i as f64 + 0.5) / n).cos())
                .sum();
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            s * scale
        })
        .collect()
}

pub fn frame_mfcc(column: &[f64], filterbank: &[Vec<f64>]) -> Vec<f64> {
    let log_energies: Vec<f64> = filterbank
        .iter()
        .map(|w| {
            let e: f64 = w.iter().zip(column).map(|(a, b)| a * b).sum();
            e.max(LOG_FLOOR).ln()
        })
        .collect();
    dct2_ortho(&log_energies, MFCC_COEFFS)
}

/// Per-frame MFCC rows for an existing spectrogram.
pub fn mfcc_frames(spec: &Spectrogram) -> Vec<Vec<f64>> {
    let fb = mel_filterbank(MFCC_FILTERS, spec.window_size, spec.sample_rate);
    spec.columns.iter().map(|c| frame_mfcc(c, &fb)).collect()
}

/// Clip-level MFCC: coefficient-wise mean of the per-frame vectors.
pub fn mfcc(audio: &PcmAudio) -> Result<Vec<f64>> {
    let spec = stft_spectrogram(audio, DEFAULT_WINDOW, DEFAULT_HOP)?;
    let frames = mfcc_frames(&spec);
    let n = frames.len() as f64;
    let mut out = vec![0.0; MFCC_COEFFS];
    for f in &frames {
        for (o, v) in out.iter_mut().zip(f) {
            *o += v;
        }
    }
    out.iter_mut().for_each(|o| *o /= n);
    Ok(out)
}
