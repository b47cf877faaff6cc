use super::stft::Spectrogram;
use crate::error::{Error, Result};

pub const SSD_BANDS: usize = 24;
pub const SSD_STATS: usize = 7;
pub const SSD_DIM: usize = SSD_BANDS * SSD_STATS;
pub const DB_FLOOR: f64 = 1e-10;

/// Critical-band edges in Hz (Zwicker); band `j` is `[EDGES[j], EDGES[j+1])`.
pub const BARK_EDGES: [f64; SSD_BANDS + 1] = [
    0.0, 100.0, 200.0, 300.0, 400.0, 510.0, 630.0, 770.0, 920.0, 1080.0, 1270.0, 1480.0, 1720.0,
    2000.0, 2320.0, 2700.0, 3150.0, 3700.0, 4400.0, 5300.0, 6400.0, 7700.0, 9500.0, 12000.0,
    15500.0,
];

/// Bark band of a frequency, or `None` beyond the last edge.
pub fn bark_band(hz: f64) -> Option<usize> {
    (0..SSD_BANDS).find(|&j| hz >= BARK_EDGES[j] && hz < BARK_EDGES[j + 1])
}

/// Number of bands whose lower edge lies below Nyquist.
pub fn active_bands(sample_rate: u32) -> usize {
    let nyquist = f64::from(sample_rate) / 2.0;
    (0..SSD_BANDS).filter(|&j| BARK_EDGES[j] < nyquist).count()
}

/// Per-band dB energy time series: `out[band][t] = 10 log10(max(Σ|X|², ε))`.
pub fn bark_band_db(spec: &Spectrogram) -> Vec<Vec<f64>> {
    let active = active_bands(spec.sample_rate);
    let band_of: Vec<Option<usize>> = (0..spec.num_bins())
        .map(|b| bark_band(spec.bin_frequency(b)).filter(|&j| j < active))
        .collect();
    let mut out = vec![vec![0.0; spec.num_frames()]; active];
    for (t, col) in spec.columns.iter().enumerate() {
        let mut energy = vec![0.0; active];
        for (m, band) in col.iter().zip(&band_of) {
            if let Some(j) = band {
                energy[*j] += m * m;
            }
        }
        for (j, e) in energy.into_iter().enumerate() {
            out[j][t] = 10.0 * e.max(DB_FLOOR).log10();
        }
    }
    out
}

/// mean, median, variance, skewness, kurtosis, min, max (population moments;
/// kurtosis is non-excess; skewness and kurtosis are 0 when variance is 0).
pub fn band_statistics(x: &[f64]) -> [f64; SSD_STATS] {
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let (lo, hi) = (sorted[0], sorted[k - 1]);
    if lo == hi {
        return [lo, lo, 0.0, 0.0, 0.0, lo, hi];
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m3 = x.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let (skew, kurt) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2))
    } else {
        (0.0, 0.0)
    };
    let median = if k % 2 == 1 {
        sorted[k / 2]
    } else {
        (sorted[k / 2 - 1] + sorted[k / 2]) / 2.0
    };
    [mean, median, m2, skew, kurt, lo, hi]
}

/// Statistical spectrum descriptor, band-major, zero-filled above Nyquist.
pub fn ssd(spec: &Spectrogram) -> Result<Vec<f64>> {
    if spec.num_frames() < 2 {
        return Err(Error::param(format!(
            "SSD needs at least 2 spectrogram columns, got {}",
            spec.num_frames()
        )));
    }
    let mut out = vec![0.0; SSD_DIM];
    for (j, series) in bark_band_db(spec).iter().enumerate() {
        out[j * SSD_STATS..(j + 1) * SSD_STATS].copy_from_slice(&band_statistics(series));
    }
    Ok(out)
}
