use std::io::Write;
use std::path::Path;

use image::{DynamicImage, ImageFormat, ImageReader};

use super::image_buf::{bilinear_resize, GrayImage};
use super::{SaliencyError, SaliencyMap};

fn decode(path: &Path) -> Result<(DynamicImage, ImageFormat), SaliencyError> {
    let reader = ImageReader::open(path)
        .map_err(|e| SaliencyError::UnreadableImage {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?
        .with_guessed_format()
        .map_err(|e| SaliencyError::UnreadableImage {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
    let format = reader
        .format()
        .ok_or_else(|| SaliencyError::UnsupportedFormat { path: path.display().to_string() })?;
    let img = reader.decode().map_err(|e| SaliencyError::UnreadableImage {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    Ok((img, format))
}

fn to_gray(img: &DynamicImage) -> Result<GrayImage, SaliencyError> {
    match img {
        DynamicImage::ImageLuma8(g) => {
            GrayImage::from_luma8(g.width() as usize, g.height() as usize, g.as_raw())
        }
        other => {
            let rgb = other.to_rgb8();
            GrayImage::from_rgb8(rgb.width() as usize, rgb.height() as usize, rgb.as_raw())
        }
    }
}

/// Load a grayscale saliency raster (8-bit PNG or PGM), rescale values to
/// [0, 1], and bilinearly resize to the target dimensions.
pub fn load_saliency_map(
    path: &Path,
    target_w: usize,
    target_h: usize,
) -> Result<SaliencyMap, SaliencyError> {
    let (img, format) = decode(path)?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Pnm) {
        return Err(SaliencyError::UnsupportedFormat { path: path.display().to_string() });
    }
    let gray = to_gray(&img)?;
    if target_w == 0 || target_h == 0 {
        return Err(SaliencyError::EmptyImage);
    }
    let values = if gray.width() == target_w && gray.height() == target_h {
        gray.pixels().to_vec()
    } else {
        bilinear_resize(gray.pixels(), gray.width(), gray.height(), target_w, target_h)
    };
    SaliencyMap::new(target_w, target_h, values)
}

/// Decode a background image (PNG or JPEG) to luminance at native size.
pub fn load_gray_image(path: &Path) -> Result<GrayImage, SaliencyError> {
    let (img, format) = decode(path)?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Jpeg | ImageFormat::Pnm) {
        return Err(SaliencyError::UnsupportedFormat { path: path.display().to_string() });
    }
    to_gray(&img)
}

/// Write a map as binary 8-bit PGM (P5) for inspection.
pub fn save_saliency_pgm(map: &SaliencyMap, path: &Path) -> Result<(), SaliencyError> {
    let mut out = Vec::with_capacity(map.values().len() + 32);
    write!(out, "P5\n{} {}\n255\n", map.width(), map.height()).expect("in-memory write");
    out.extend(map.values().iter().map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8));
    std::fs::write(path, out).map_err(|e| SaliencyError::UnreadableImage {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}
