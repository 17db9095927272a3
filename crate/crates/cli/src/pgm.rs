// SPDX-License-Identifier: Apache-2.0

//! Binary (P5) 8-bit grayscale images.

/// Maps a row linearly onto 0..=255. A constant row becomes all zeros.
pub fn scale_row(values: &[f64]) -> Vec<u8> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if !(range > 0.0) || !range.is_finite() {
        return vec![0; values.len()];
    }
    values
        .iter()
        .map(|v| ((v - lo) / range * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Arranges `pixels` (length `height·width`) into raster order.
///
/// Row-major input is already raster order; column-major input lists the
/// image column by column.
pub fn raster(pixels: &[u8], height: usize, width: usize, column_major: bool) -> Vec<u8> {
    assert_eq!(pixels.len(), height * width);
    if !column_major {
        return pixels.to_vec();
    }
    let mut out = vec![0; pixels.len()];
    for r in 0..height {
        for c in 0..width {
            out[r * width + c] = pixels[c * height + r];
        }
    }
    out
}

pub fn encode(width: usize, height: usize, raster: &[u8]) -> Vec<u8> {
    assert_eq!(raster.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(raster);
    out
}
