//! Frame index selection for trailers.

use crate::error::{Error, Result};

/// Frames taken around each anchor: 40 per anchor with stride 3.
const PER_ANCHOR: usize = 40;
const STRIDE: usize = 3;
const HALF_SPAN: usize = 60;
/// Smallest usable range that fits a full block around the last anchor.
const MIN_USABLE: usize = 2 * HALF_SPAN + 1;

/// 120 frame indices for the sequence-model pipeline.
///
/// The first and last `floor(0.05 N)` frames are discarded. Three anchors are
/// placed at `start + 60`, the midpoint of the usable range and `end - 61`;
/// around each, indices `anchor - 60, anchor - 57, ..., anchor + 57` are taken.
pub fn select_frames_deep(frame_count: usize) -> Result<Vec<usize>> {
    let cut = frame_count / 20;
    let usable = frame_count.saturating_sub(2 * cut);
    if usable < MIN_USABLE {
        return Err(Error::InsufficientFrames {
            usable,
            required: MIN_USABLE,
        });
    }
    let start = cut;
    let end = frame_count - cut;
    let anchors = [start + HALF_SPAN, start + usable / 2, end - HALF_SPAN - 1];
    let mut out = Vec::with_capacity(3 * PER_ANCHOR);
    for a in anchors {
        out.extend((0..PER_ANCHOR).map(|j| a - HALF_SPAN + STRIDE * j));
    }
    Ok(out)
}

/// `n` linearly spaced indices, `round(i (N-1) / (n-1))` with halves rounded up.
/// Repeats indices when the clip has fewer than `n` frames.
pub fn select_frames_uniform(frame_count: usize, n: usize) -> Result<Vec<usize>> {
    if frame_count == 0 || n == 0 {
        return Err(Error::param("uniform frame selection needs at least one frame"));
    }
    if n == 1 {
        return Ok(vec![0]);
    }
    let (span, den) = ((frame_count - 1) as u128, (n - 1) as u128);
    Ok((0..n as u128)
        .map(|i| ((2 * i * span + den) / (2 * den)) as usize)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deep_selection_for_2000_frames() {
        let idx = select_frames_deep(2000).unwrap();
        assert_eq!(idx.len(), 120);
        let first: Vec<usize> = (0..40).map(|j| 100 + 3 * j).collect();
        assert_eq!(&idx[..40], &first[..]);
        assert_eq!(idx[39], 217);
        // middle anchor at 100 + 900
        assert_eq!(idx[40], 940);
        // last anchor at 1900 - 61
        assert_eq!(idx[80], 1779);
        assert_eq!(idx[119], 1896);
        assert!(idx.iter().all(|&i| (100..1900).contains(&i)));
    }

    #[test]
    fn deep_selection_boundary() {
        // usable span 120
        assert!(matches!(
            select_frames_deep(132),
            Err(Error::InsufficientFrames { usable: 120, .. })
        ));
        // usable span 121 is the minimum
        let idx = select_frames_deep(133).unwrap();
        assert_eq!(idx.len(), 120);
        assert!(idx.iter().all(|&i| (6..127).contains(&i)));
    }

    #[test]
    fn uniform_identity_and_stride() {
        assert_eq!(select_frames_uniform(555, 555).unwrap(), (0..555).collect::<Vec<_>>());
        assert_eq!(
            select_frames_uniform(1109, 555).unwrap(),
            (0..555).map(|i| 2 * i).collect::<Vec<_>>()
        );
    }

    #[test]
    fn uniform_with_duplicates() {
        assert_eq!(select_frames_uniform(3, 5).unwrap(), vec![0, 1, 1, 2, 2]);
    }
}
