//! Audio descriptors: magnitude STFT, MFCC, SSD and spectrogram LBP.

pub mod mfcc;
pub mod pcm;
pub mod spec_lbp;
pub mod ssd;
pub mod stft;

pub use mfcc::mfcc;
pub use pcm::{load_wav, PcmAudio};
pub use spec_lbp::{audio_spec_lbp, spectrogram_to_gray};
pub use ssd::ssd;
pub use stft::{crop_pad_30s, stft_spectrogram, Spectrogram, DEFAULT_HOP, DEFAULT_WINDOW};

use crate::error::Result;

/// All three handcrafted audio descriptors for one clip.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioDescriptors {
    pub mfcc: Vec<f64>,
    pub ssd: Vec<f64>,
    pub spec_lbp: Vec<f64>,
}

/// SSD is taken over the whole clip; the LBP image uses the 30 s crop.
pub fn audio_descriptors(audio: &PcmAudio) -> Result<AudioDescriptors> {
    let spec = stft_spectrogram(audio, DEFAULT_WINDOW, DEFAULT_HOP)?;
    let mfcc = {
        let frames = mfcc::mfcc_frames(&spec);
        let n = frames.len() as f64;
        (0..mfcc::MFCC_COEFFS)
            .map(|k| frames.iter().map(|f| f[k]).sum::<f64>() / n)
            .collect()
    };
    let ssd = ssd::ssd(&spec)?;
    let image = spectrogram_to_gray(&crop_pad_30s(&spec), spec_lbp::DYNAMIC_RANGE_DB);
    let spec_lbp = crate::frames::lbp::lbp_u2_8_2(&image)?;
    Ok(AudioDescriptors { mfcc, ssd, spec_lbp })
}
