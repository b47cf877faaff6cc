//! Uniform rotation-variant LBP with 8 neighbours at radius 2.
//!
//! Neighbour `p` sits at angle `p·45°` counter-clockwise from the positive x
//! axis (image y grows downwards). The four axis neighbours fall on integer
//! pixels; the four diagonal ones are bilinearly interpolated. Bit `p` is set
//! when the neighbour is greater than or equal to the centre.

use super::image::GrayImage;
use crate::error::{Error, Result};

/// Histogram length: 58 uniform patterns plus one bin for all others.
pub const LBP_BINS: usize = 59;
pub const RADIUS: usize = 2;

/// Circular 0/1 transitions in an 8-bit pattern.
pub fn transitions(pattern: u8) -> u32 {
    (pattern ^ pattern.rotate_right(1)).count_ones()
}

/// Maps every 8-bit pattern to its histogram bin. Uniform patterns (at most
/// two transitions) get bins 0..58 in ascending pattern order; the rest share
/// bin 58.
pub fn uniform_bin_table() -> [u8; 256] {
    let mut table = [0u8; 256];
    let mut next = 0u8;
    for p in 0..=255u8 {
        if transitions(p) <= 2 {
            table[p as usize] = next;
            next += 1;
        } else {
            table[p as usize] = (LBP_BINS - 1) as u8;
        }
    }
    debug_assert_eq!(next as usize, LBP_BINS - 1);
    table
}

// sqrt(2): both coordinates of a diagonal neighbour at radius 2
const D: f64 = std::f64::consts::SQRT_2;

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

/// Bilinear sample at (x0 + fx, y0 + fy), fx, fy in [0, 1).
#[inline]
fn bilinear(img: &GrayImage, x0: usize, y0: usize, fx: f64, fy: f64) -> f64 {
    let p = |x: usize, y: usize| f64::from(img.get(x, y));
    let top = lerp(p(x0, y0), p(x0 + 1, y0), fx);
    let bottom = lerp(p(x0, y0 + 1), p(x0 + 1, y0 + 1), fx);
    lerp(top, bottom, fy)
}

/// LBP code of an interior pixel (`2 <= x < w-2`, `2 <= y < h-2`).
pub fn lbp_code(img: &GrayImage, x: usize, y: usize) -> u8 {
    let c = f64::from(img.get(x, y));
    // floor(+-sqrt2) offsets are +1 / -2, with fractional parts below
    let f_pos = D - 1.0;
    let f_neg = 2.0 - D;
    let neighbours = [
        f64::from(img.get(x + 2, y)),
        bilinear(img, x + 1, y - 2, f_pos, f_neg),
        f64::from(img.get(x, y - 2)),
        bilinear(img, x - 2, y - 2, f_neg, f_neg),
        f64::from(img.get(x - 2, y)),
        bilinear(img, x - 2, y + 1, f_neg, f_pos),
        f64::from(img.get(x, y + 2)),
        bilinear(img, x + 1, y + 1, f_pos, f_pos),
    ];
    neighbours
        .iter()
        .enumerate()
        .fold(0u8, |acc, (p, &v)| if v >= c { acc | (1 << p) } else { acc })
}

/// L1-normalised 59-bin uniform LBP histogram over interior pixels.
pub fn lbp_u2_8_2(img: &GrayImage) -> Result<Vec<f64>> {
    let min = 2 * RADIUS + 1;
    if img.width < min || img.height < min {
        return Err(Error::param(format!(
            "LBP(8,2) needs at least a {min}x{min} image, got {}x{}",
            img.width, img.height
        )));
    }
    let table = uniform_bin_table();
    let mut counts = [0u64; LBP_BINS];
    for y in RADIUS..img.height - RADIUS {
        for x in RADIUS..img.width - RADIUS {
            counts[table[lbp_code(img, x, y) as usize] as usize] += 1;
        }
    }
    let n = ((img.width - 2 * RADIUS) * (img.height - 2 * RADIUS)) as f64;
    Ok(counts.iter().map(|&c| c as f64 / n).collect())
}
