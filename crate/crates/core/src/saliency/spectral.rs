use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::image_buf::{area_resize, bilinear_resize, GrayImage};
use super::{SaliencyError, SaliencyMap};

/// Coarse working width of the spectral analysis, following the original
/// method's convention of operating at a small scale.
pub const DEFAULT_WORKING_WIDTH: usize = 64;

/// Amplitude floor relative to the spectrum peak (-80 dB). Keeps the
/// log-amplitude bounded at bins where a synthetic input produces exact
/// spectral zeros, which would otherwise turn into huge residual spikes.
const AMP_FLOOR_REL: f64 = 1e-4;
const BLUR_SIGMA: f64 = 2.5;
const BLUR_TAPS: usize = 8;

/// Spectral-residual saliency:
///
/// 1. area-average resize to `working_width` (aspect preserved)
/// 2. 2-D FFT
/// 3. log-amplitude spectrum
/// 4. residual = log-amplitude - 3x3 box-filtered log-amplitude
/// 5. inverse FFT of exp(residual) carrying the original phase
/// 6. squared magnitude
/// 7. Gaussian blur, sigma 2.5 over an 8x8 support
/// 8. min-max normalization to [0, 1]
/// 9. bilinear resize back to the input dimensions
///
/// A flat input has no spectral structure and maps to the all-zero map.
pub fn spectral_residual(
    image: &GrayImage,
    working_width: usize,
) -> Result<SaliencyMap, SaliencyError> {
    if working_width == 0 {
        return Err(SaliencyError::EmptyImage);
    }
    let (w, h) = (image.width(), image.height());
    let ww = working_width;
    let wh = ((h as f64 * ww as f64 / w as f64).round() as usize).max(1);
    let small = area_resize(image.pixels(), w, h, ww, wh);

    let flat = {
        let mut min = f32::INFINITY;
        let mut max = f32::NEG_INFINITY;
        for &v in &small {
            min = min.min(v);
            max = max.max(v);
        }
        max - min <= 1e-9
    };
    if flat {
        return SaliencyMap::new(w, h, vec![0.0; w * h]);
    }

    let mut field: Vec<Complex<f64>> =
        small.iter().map(|&v| Complex::new(v as f64, 0.0)).collect();
    fft_2d(&mut field, ww, wh, false);

    // The floor is relative to the largest non-DC amplitude so that it is
    // invariant under contrast inversion; bins below it carry numerically
    // meaningless phase and are dropped from the reconstruction, as is the
    // DC bin (the image mean holds no salience).
    let peak = field.iter().skip(1).map(|c| c.norm()).fold(0.0f64, f64::max);
    let floor = (peak * AMP_FLOOR_REL).max(f64::MIN_POSITIVE);
    let log_amp: Vec<f64> = field.iter().map(|c| (c.norm() + floor).ln()).collect();
    let smoothed = box_filter_3x3(&log_amp, ww, wh);
    let mut spectrum = Vec::with_capacity(field.len());
    for (i, c) in field.iter().enumerate() {
        if i == 0 || c.norm() < floor {
            spectrum.push(Complex::new(0.0, 0.0));
            continue;
        }
        let residual = log_amp[i] - smoothed[i];
        let phase = c.arg();
        spectrum.push(Complex::from_polar(residual.exp(), phase));
    }
    fft_2d(&mut spectrum, ww, wh, true);
    let n = (ww * wh) as f64;
    let mut sal: Vec<f64> = spectrum.iter().map(|c| (c / n).norm_sqr()).collect();

    gaussian_blur(&mut sal, ww, wh);

    let min = sal.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = sal.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    let normalized: Vec<f32> = if range > 0.0 {
        sal.iter().map(|&v| ((v - min) / range) as f32).collect()
    } else {
        vec![0.0; sal.len()]
    };

    let full = bilinear_resize(&normalized, ww, wh, w, h);
    SaliencyMap::new(w, h, full)
}

/// In-place 2-D FFT via row transforms followed by column transforms.
fn fft_2d(data: &mut [Complex<f64>], w: usize, h: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let row_fft = if inverse { planner.plan_fft_inverse(w) } else { planner.plan_fft_forward(w) };
    for row in data.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let col_fft = if inverse { planner.plan_fft_inverse(h) } else { planner.plan_fft_forward(h) };
    let mut column = vec![Complex::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            column[y] = data[y * w + x];
        }
        col_fft.process(&mut column);
        for y in 0..h {
            data[y * w + x] = column[y];
        }
    }
}

/// 3x3 mean filter with replicated borders.
fn box_filter_3x3(src: &[f64], w: usize, h: usize) -> Vec<f64> {
    let clamp = |v: i64, hi: usize| v.clamp(0, hi as i64 - 1) as usize;
    let mut out = Vec::with_capacity(src.len());
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    acc += src[clamp(y + dy, h) * w + clamp(x + dx, w)];
                }
            }
            out.push(acc / 9.0);
        }
    }
    out
}

/// Separable Gaussian over an 8-tap support centered between samples
/// (offsets -4..=3 around -0.5), replicated borders.
fn gaussian_blur(data: &mut Vec<f64>, w: usize, h: usize) {
    let mut kernel = [0.0f64; BLUR_TAPS];
    let mut sum = 0.0;
    for (i, k) in kernel.iter_mut().enumerate() {
        let d = i as f64 - 4.0 + 0.5; // -3.5 .. 3.5
        *k = (-(d * d) / (2.0 * BLUR_SIGMA * BLUR_SIGMA)).exp();
        sum += *k;
    }
    for k in &mut kernel {
        *k /= sum;
    }

    let clamp = |v: i64, hi: usize| v.clamp(0, hi as i64 - 1) as usize;
    let mut tmp = vec![0.0f64; data.len()];
    for y in 0..h {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for (i, &k) in kernel.iter().enumerate() {
                acc += k * data[y * w + clamp(x + i as i64 - 4, w)];
            }
            tmp[y * w + x as usize] = acc;
        }
    }
    for x in 0..w {
        for y in 0..h as i64 {
            let mut acc = 0.0;
            for (i, &k) in kernel.iter().enumerate() {
                acc += k * tmp[clamp(y + i as i64 - 4, h) * w + x];
            }
            data[y as usize * w + x] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn bright_square_image() -> GrayImage {
        let mut pixels = vec![0.1f32; 64 * 64];
        for y in 28..36 {
            for x in 28..36 {
                pixels[y * 64 + x] = 0.9;
            }
        }
        GrayImage::new(64, 64, pixels).unwrap()
    }

    fn square_stats(map: &SaliencyMap, x0: usize, y0: usize) -> (f64, f64) {
        let mut inside = 0.0;
        let mut outside = 0.0;
        let mut n_in = 0usize;
        let mut n_out = 0usize;
        for y in 0..map.height() {
            for x in 0..map.width() {
                let v = map.get(x, y) as f64;
                if x >= x0 && x < x0 + 8 && y >= y0 && y < y0 + 8 {
                    inside += v;
                    n_in += 1;
                } else {
                    outside += v;
                    n_out += 1;
                }
            }
        }
        (inside / n_in as f64, outside / n_out as f64)
    }

    #[test]
    fn uniform_image_maps_to_zero() {
        let img = GrayImage::new(64, 64, vec![0.5; 64 * 64]).unwrap();
        let map = spectral_residual(&img, DEFAULT_WORKING_WIDTH).unwrap();
        assert!(map.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bright_square_dominates_the_map() {
        let map = spectral_residual(&bright_square_image(), DEFAULT_WORKING_WIDTH).unwrap();
        let (inside, outside) = square_stats(&map, 28, 28);
        assert!(
            inside >= 5.0 * outside,
            "expected in-square salience >= 5x out-of-square (got {inside:.4} vs {outside:.4})"
        );
    }

    #[test]
    fn contrast_inversion_leaves_the_map_nearly_unchanged() {
        // Amplitude anomalies are symmetric under inversion: only the DC
        // neighborhood differs, so the normalized maps stay close.
        let img = bright_square_image();
        let inverted = GrayImage::new(
            64,
            64,
            img.pixels().iter().map(|&v| 1.0 - v).collect(),
        )
        .unwrap();
        let a = spectral_residual(&img, DEFAULT_WORKING_WIDTH).unwrap();
        let b = spectral_residual(&inverted, DEFAULT_WORKING_WIDTH).unwrap();
        let max_diff = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(&x, &y)| (x - y).abs())
            .fold(0.0f32, f32::max);
        assert!(max_diff < 0.05, "max abs diff {max_diff}");
    }

    #[test]
    fn translation_moves_the_salient_blob() {
        let shifted = {
            let mut pixels = vec![0.1f32; 64 * 64];
            for y in 28..36 {
                for x in 36..44 {
                    pixels[y * 64 + x] = 0.9;
                }
            }
            GrayImage::new(64, 64, pixels).unwrap()
        };
        let base = spectral_residual(&bright_square_image(), DEFAULT_WORKING_WIDTH).unwrap();
        let moved = spectral_residual(&shifted, DEFAULT_WORKING_WIDTH).unwrap();
        let centroid = |m: &SaliencyMap| {
            let mut sx = 0.0f64;
            let mut sy = 0.0f64;
            let mut total = 0.0f64;
            for y in 0..m.height() {
                for x in 0..m.width() {
                    let v = m.get(x, y) as f64;
                    sx += v * x as f64;
                    sy += v * y as f64;
                    total += v;
                }
            }
            (sx / total, sy / total)
        };
        let (bx, by) = centroid(&base);
        let (mx, my) = centroid(&moved);
        assert!(((mx - bx) - 8.0).abs() <= 2.0, "x shift {:.2}", mx - bx);
        assert!((my - by).abs() <= 2.0, "y shift {:.2}", my - by);
    }

    #[test]
    fn no_nan_or_inf_on_fuzzed_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for case in 0..24 {
            let w = rng.gen_range(1..90);
            let h = rng.gen_range(1..90);
            let pixels: Vec<f32> = (0..w * h)
                .map(|_| {
                    if case % 3 == 0 {
                        // Mostly-flat images with occasional spikes.
                        if rng.gen_bool(0.05) {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        rng.gen_range(0.0..1.0)
                    }
                })
                .collect();
            let img = GrayImage::new(w, h, pixels).unwrap();
            let map = spectral_residual(&img, DEFAULT_WORKING_WIDTH).unwrap();
            assert!(map.values().iter().all(|v| v.is_finite()));
            assert!(map.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    /// Independent reference: the same step list implemented with a naive
    /// separable DFT instead of the FFT library. The two routes must agree
    /// to float precision on the working grid.
    #[test]
    fn agrees_with_naive_dft_reference() {
        let img = bright_square_image();
        let fast = spectral_residual(&img, 64).unwrap();
        let reference = naive_reference(&img);
        let mut max_diff = 0.0f64;
        for (a, b) in fast.values().iter().zip(&reference) {
            max_diff = max_diff.max((*a as f64 - b).abs());
        }
        assert!(max_diff < 1e-4, "max abs diff {max_diff}");
    }

    fn naive_dft_1d(input: &[Complex<f64>], inverse: bool) -> Vec<Complex<f64>> {
        let n = input.len();
        let sign = if inverse { 1.0 } else { -1.0 };
        (0..n)
            .map(|k| {
                let mut acc = Complex::new(0.0, 0.0);
                for (t, v) in input.iter().enumerate() {
                    let angle = sign * 2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
                    acc += v * Complex::new(angle.cos(), angle.sin());
                }
                acc
            })
            .collect()
    }

    fn naive_dft_2d(data: &[Complex<f64>], w: usize, h: usize, inverse: bool) -> Vec<Complex<f64>> {
        let mut rows: Vec<Complex<f64>> = Vec::with_capacity(w * h);
        for y in 0..h {
            rows.extend(naive_dft_1d(&data[y * w..(y + 1) * w], inverse));
        }
        let mut out = vec![Complex::new(0.0, 0.0); w * h];
        for x in 0..w {
            let col: Vec<Complex<f64>> = (0..h).map(|y| rows[y * w + x]).collect();
            for (y, v) in naive_dft_1d(&col, inverse).into_iter().enumerate() {
                out[y * w + x] = v;
            }
        }
        out
    }

    fn naive_reference(img: &GrayImage) -> Vec<f64> {
        let (w, h) = (img.width(), img.height());
        let small = area_resize(img.pixels(), w, h, 64, 64);
        let field: Vec<Complex<f64>> =
            small.iter().map(|&v| Complex::new(v as f64, 0.0)).collect();
        let spectrum = naive_dft_2d(&field, 64, 64, false);
        let peak = spectrum.iter().skip(1).map(|c| c.norm()).fold(0.0f64, f64::max);
        let floor = (peak * AMP_FLOOR_REL).max(f64::MIN_POSITIVE);
        let log_amp: Vec<f64> = spectrum.iter().map(|c| (c.norm() + floor).ln()).collect();
        let smoothed = box_filter_3x3(&log_amp, 64, 64);
        let modified: Vec<Complex<f64>> = spectrum
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == 0 || c.norm() < floor {
                    Complex::new(0.0, 0.0)
                } else {
                    Complex::from_polar((log_amp[i] - smoothed[i]).exp(), c.arg())
                }
            })
            .collect();
        let back = naive_dft_2d(&modified, 64, 64, true);
        let n = (64 * 64) as f64;
        let mut sal: Vec<f64> = back.iter().map(|c| (c / n).norm_sqr()).collect();
        gaussian_blur(&mut sal, 64, 64);
        let min = sal.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = sal.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let range = max - min;
        sal.iter().map(|&v| if range > 0.0 { (v - min) / range } else { 0.0 }).collect()
    }
}
