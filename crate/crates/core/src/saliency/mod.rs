//! Per-pixel saliency for background images: a built-in spectral-residual
//! implementation plus loading of precomputed grayscale maps, feeding the
//! utility, occlusion, and unreadability metrics.

mod image_buf;
mod io;
mod spectral;

pub use image_buf::{area_resize, bilinear_resize, GrayImage};
pub use io::{load_gray_image, load_saliency_map, save_saliency_pgm};
pub use spectral::{spectral_residual, DEFAULT_WORKING_WIDTH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::Rect;

#[derive(Debug, Error)]
pub enum SaliencyError {
    #[error("image has no pixels")]
    EmptyImage,
    #[error("pixel buffer length {got} does not match {w}x{h}")]
    BadBufferLength { w: usize, h: usize, got: usize },
    #[error("cannot read image {path}: {reason}")]
    UnreadableImage { path: String, reason: String },
    #[error("unsupported image format for {path} (need 8-bit grayscale PNG or PGM)")]
    UnsupportedFormat { path: String },
    #[error("threshold {0} is outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("region does not intersect the map")]
    EmptyRegion,
}

/// Row-major per-pixel salience in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    width: usize,
    height: usize,
    values: Vec<f32>,
}

impl SaliencyMap {
    /// Values are clamped into [0, 1] on construction.
    pub fn new(width: usize, height: usize, mut values: Vec<f32>) -> Result<Self, SaliencyError> {
        if width == 0 || height == 0 {
            return Err(SaliencyError::EmptyImage);
        }
        if values.len() != width * height {
            return Err(SaliencyError::BadBufferLength { w: width, h: height, got: values.len() });
        }
        for v in &mut values {
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Self { width, height, values })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.values[y * self.width + x]
    }
}

/// Boolean salience mask; true marks salient pixels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, SaliencyError> {
        if bits.len() != width * height {
            return Err(SaliencyError::BadBufferLength { w: width, h: height, got: bits.len() });
        }
        Ok(Self { width, height, bits })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn count_salient(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Default salience threshold used to split maps into salient / non-salient.
pub const DEFAULT_THETA: f64 = 0.5;

/// Binarize a map: a pixel is salient when its value is >= `theta`.
pub fn threshold_mask(map: &SaliencyMap, theta: f64) -> Result<BinaryMask, SaliencyError> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(SaliencyError::InvalidThreshold(theta));
    }
    let bits = map.values.iter().map(|&v| v as f64 >= theta).collect();
    BinaryMask::new(map.width, map.height, bits)
}

/// Arithmetic mean of map values over `r` clipped to the map bounds.
pub fn region_mean(map: &SaliencyMap, r: &Rect) -> Result<f64, SaliencyError> {
    let x0 = r.x().max(0);
    let y0 = r.y().max(0);
    let x1 = r.right().min(map.width as i64);
    let y1 = r.bottom().min(map.height as i64);
    if x0 >= x1 || y0 >= y1 {
        return Err(SaliencyError::EmptyRegion);
    }
    let mut sum = 0.0f64;
    for y in y0..y1 {
        for x in x0..x1 {
            sum += map.get(x as usize, y as usize) as f64;
        }
    }
    Ok(sum / ((x1 - x0) * (y1 - y0)) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(x: i64, y: i64, w: i64, h: i64) -> Rect {
        Rect::new(x, y, w, h).unwrap()
    }

    #[test]
    fn threshold_edges() {
        let map = SaliencyMap::new(2, 2, vec![0.2, 0.6, 0.5, 0.49]).unwrap();
        let all = threshold_mask(&map, 0.0).unwrap();
        assert_eq!(all.count_salient(), 4);
        assert!(threshold_mask(&map, 1.2).is_err());
        assert!(threshold_mask(&map, -0.1).is_err());
        let half = threshold_mask(&map, 0.5).unwrap();
        assert_eq!(half.bits(), &[false, true, true, false]);
    }

    #[test]
    fn rethresholding_a_binary_map_is_identity() {
        let map = SaliencyMap::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        for theta in [0.25, 0.5, 1.0] {
            let mask = threshold_mask(&map, theta).unwrap();
            assert_eq!(mask.bits(), &[false, true, true, false]);
        }
    }

    #[test]
    fn region_mean_cases() {
        let map = SaliencyMap::new(4, 4, vec![0.3; 16]).unwrap();
        assert!((region_mean(&map, &rect(1, 1, 2, 2)).unwrap() - 0.3).abs() < 1e-6);
        assert!((region_mean(&map, &rect(0, 0, 4, 4)).unwrap() - 0.3).abs() < 1e-6);
        assert!(region_mean(&map, &rect(10, 10, 3, 3)).is_err());
        assert!(region_mean(&map, &rect(0, 0, 0, 4)).is_err());

        // Half-zero / half-one map: a rect straddling the midline equally
        // averages to 0.5 (pixel-count oracle: 4 zero + 4 one pixels).
        let mut vals = vec![0.0f32; 16];
        for y in 0..4 {
            for x in 2..4 {
                vals[y * 4 + x] = 1.0;
            }
        }
        let half = SaliencyMap::new(4, 4, vals).unwrap();
        assert_eq!(region_mean(&half, &rect(1, 0, 2, 4)).unwrap(), 0.5);
    }

    #[test]
    fn map_clamps_values() {
        let map = SaliencyMap::new(1, 2, vec![-0.5, 1.7]).unwrap();
        assert_eq!(map.values(), &[0.0, 1.0]);
    }
}
