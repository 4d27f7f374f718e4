use super::SaliencyError;

/// Row-major luminance image with values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f32>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, mut pixels: Vec<f32>) -> Result<Self, SaliencyError> {
        if width == 0 || height == 0 {
            return Err(SaliencyError::EmptyImage);
        }
        if pixels.len() != width * height {
            return Err(SaliencyError::BadBufferLength { w: width, h: height, got: pixels.len() });
        }
        for p in &mut pixels {
            *p = p.clamp(0.0, 1.0);
        }
        Ok(Self { width, height, pixels })
    }

    /// Rec. 601 luma from interleaved 8-bit RGB: 0.299 R + 0.587 G + 0.114 B.
    pub fn from_rgb8(width: usize, height: usize, rgb: &[u8]) -> Result<Self, SaliencyError> {
        if rgb.len() != width * height * 3 {
            return Err(SaliencyError::BadBufferLength { w: width, h: height, got: rgb.len() });
        }
        let pixels = rgb
            .chunks_exact(3)
            .map(|px| {
                (0.299 * px[0] as f32 + 0.587 * px[1] as f32 + 0.114 * px[2] as f32) / 255.0
            })
            .collect();
        Self::new(width, height, pixels)
    }

    pub fn from_luma8(width: usize, height: usize, luma: &[u8]) -> Result<Self, SaliencyError> {
        if luma.len() != width * height {
            return Err(SaliencyError::BadBufferLength { w: width, h: height, got: luma.len() });
        }
        Self::new(width, height, luma.iter().map(|&v| v as f32 / 255.0).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.pixels[y * self.width + x]
    }

    /// Clamped lookup used by gradient stencils at the borders.
    pub fn get_clamped(&self, x: i64, y: i64) -> f32 {
        let x = x.clamp(0, self.width as i64 - 1) as usize;
        let y = y.clamp(0, self.height as i64 - 1) as usize;
        self.get(x, y)
    }
}

/// Area-averaging resample (pixel mixing): each destination pixel is the
/// overlap-weighted mean of the source pixels under its footprint. Exact
/// for integer downscale factors and well-behaved in both directions.
pub fn area_resize(src: &[f32], sw: usize, sh: usize, dw: usize, dh: usize) -> Vec<f32> {
    assert_eq!(src.len(), sw * sh);
    assert!(dw > 0 && dh > 0);
    let x_ratio = sw as f64 / dw as f64;
    let y_ratio = sh as f64 / dh as f64;
    let mut out = Vec::with_capacity(dw * dh);
    for dy in 0..dh {
        let y0 = dy as f64 * y_ratio;
        let y1 = (dy + 1) as f64 * y_ratio;
        for dx in 0..dw {
            let x0 = dx as f64 * x_ratio;
            let x1 = (dx + 1) as f64 * x_ratio;
            let mut acc = 0.0f64;
            let mut weight = 0.0f64;
            let sy0 = y0.floor() as usize;
            let sy1 = (y1.ceil() as usize).min(sh);
            let sx0 = x0.floor() as usize;
            let sx1 = (x1.ceil() as usize).min(sw);
            for sy in sy0..sy1 {
                let wy = (y1.min((sy + 1) as f64) - y0.max(sy as f64)).max(0.0);
                if wy == 0.0 {
                    continue;
                }
                for sx in sx0..sx1 {
                    let wx = (x1.min((sx + 1) as f64) - x0.max(sx as f64)).max(0.0);
                    if wx == 0.0 {
                        continue;
                    }
                    acc += src[sy * sw + sx] as f64 * wx * wy;
                    weight += wx * wy;
                }
            }
            out.push(if weight > 0.0 { (acc / weight) as f32 } else { 0.0 });
        }
    }
    out
}

/// Center-aligned bilinear resample: destination pixel centers map to
/// `(d + 0.5) * s/d - 0.5` in source coordinates, clamped at the borders.
pub fn bilinear_resize(src: &[f32], sw: usize, sh: usize, dw: usize, dh: usize) -> Vec<f32> {
    assert_eq!(src.len(), sw * sh);
    assert!(dw > 0 && dh > 0);
    let mut out = Vec::with_capacity(dw * dh);
    let x_ratio = sw as f64 / dw as f64;
    let y_ratio = sh as f64 / dh as f64;
    for dy in 0..dh {
        let fy = ((dy as f64 + 0.5) * y_ratio - 0.5).clamp(0.0, (sh - 1) as f64);
        let y0 = fy.floor() as usize;
        let y1 = (y0 + 1).min(sh - 1);
        let ty = fy - y0 as f64;
        for dx in 0..dw {
            let fx = ((dx as f64 + 0.5) * x_ratio - 0.5).clamp(0.0, (sw - 1) as f64);
            let x0 = fx.floor() as usize;
            let x1 = (x0 + 1).min(sw - 1);
            let tx = fx - x0 as f64;
            let top = src[y0 * sw + x0] as f64 * (1.0 - tx) + src[y0 * sw + x1] as f64 * tx;
            let bottom = src[y1 * sw + x0] as f64 * (1.0 - tx) + src[y1 * sw + x1] as f64 * tx;
            out.push((top * (1.0 - ty) + bottom * ty) as f32);
        }
    }
    out
}
