use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::pcm::PcmAudio;
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 1024;
pub const DEFAULT_HOP: usize = 512;

/// Magnitude STFT: `columns[t][b]` is |X_t(b)| for `b` in `0..=window/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub columns: Vec<Vec<f64>>,
    pub window_size: usize,
    pub hop: usize,
    pub sample_rate: u32,
}

impl Spectrogram {
    pub fn num_frames(&self) -> usize {
        self.columns.len()
    }

    pub fn num_bins(&self) -> usize {
        self.window_size / 2 + 1
    }

    pub fn bin_frequency(&self, bin: usize) -> f64 {
        bin as f64 * f64::from(self.sample_rate) / self.window_size as f64
    }
}

/// Symmetric Hann window, `0.5 - 0.5 cos(2πn / (N-1))`.
pub fn hann_window(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let den = (n - 1) as f64;
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / den).cos())
        .collect()
}

/// Number of STFT columns for a signal of `len` samples.
pub fn frame_count(len: usize, window_size: usize, hop: usize) -> usize {
    if len < window_size {
        0
    } else {
        1 + (len - window_size) / hop
    }
}

pub fn stft_spectrogram(audio: &PcmAudio, window_size: usize, hop: usize) -> Result<Spectrogram> {
    if window_size < 2 || hop == 0 {
        return Err(Error::param(format!(
            "invalid STFT geometry: window {window_size}, hop {hop}"
        )));
    }
    if audio.samples.len() < window_size {
        return Err(Error::param(format!(
            "audio has {} samples, shorter than one {window_size}-sample window",
            audio.samples.len()
        )));
    }
    let window = hann_window(window_size);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(window_size);
    let bins = window_size / 2 + 1;
    let frames = frame_count(audio.samples.len(), window_size, hop);
    let mut buf = vec![Complex::new(0.0, 0.0); window_size];
    let mut columns = Vec::with_capacity(frames);
    for t in 0..frames {
        let start = t * hop;
        for (b, (&x, &w)) in buf
            .iter_mut()
            .zip(audio.samples[start..start + window_size].iter().zip(&window))
        {
            *b = Complex::new(x * w, 0.0);
        }
        fft.process(&mut buf);
        columns.push(buf[..bins].iter().map(|c| c.norm()).collect());
    }
    Ok(Spectrogram {
        columns,
        window_size,
        hop,
        sample_rate: audio.sample_rate,
    })
}

/// Column count spanning `seconds` of audio at the spectrogram's geometry.
pub fn columns_for_duration(seconds: u32, sample_rate: u32, window_size: usize, hop: usize) -> usize {
    let samples = seconds as usize * sample_rate as usize;
    frame_count(samples, window_size, hop).max(1)
}

/// Centre-crops (or right-pads with zero columns) to exactly 30 seconds.
pub fn crop_pad_30s(spec: &Spectrogram) -> Spectrogram {
    let target = columns_for_duration(30, spec.sample_rate, spec.window_size, spec.hop);
    let t = spec.num_frames();
    let columns = if t >= target {
        let start = (t - target) / 2;
        spec.columns[start..start + target].to_vec()
    } else {
        let mut c = spec.columns.clone();
        c.resize(target, vec![0.0; spec.num_bins()]);
        c
    };
    Spectrogram {
        columns,
        window_size: spec.window_size,
        hop: spec.hop,
        sample_rate: spec.sample_rate,
    }
}
