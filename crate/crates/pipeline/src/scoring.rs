use num_rational::Ratio;

use adlayout_core::layout::{scale_layout, Layout};
use adlayout_core::metrics::{score_layout, MetricOptions, MetricReport, SaliencySource, ScoreInputs};
use adlayout_core::saliency::{
    load_gray_image, load_saliency_map, spectral_residual, GrayImage, SaliencyMap,
    DEFAULT_WORKING_WIDTH,
};

use super::dataset::{DatasetManifest, ManifestEntry};
use super::PipelineError;

/// The saliency map for one sample: the dataset's precomputed map when it
/// ships one, otherwise spectral residual over the background.
pub fn sample_saliency(
    manifest: &DatasetManifest,
    entry: &ManifestEntry,
    background: &GrayImage,
) -> Result<(SaliencyMap, SaliencySource), PipelineError> {
    if let Some(path) = manifest.saliency_path(entry) {
        let map = load_saliency_map(&path, entry.width as usize, entry.height as usize)?;
        return Ok((map, SaliencySource::Precomputed));
    }
    let map = spectral_residual(background, DEFAULT_WORKING_WIDTH)?;
    Ok((map, SaliencySource::SpectralResidual))
}

/// Score a prompt-canvas layout against one dataset entry: scale onto the
/// native grid, resolve the saliency source, and run the metric suite.
pub fn score_scaled(
    layout: &Layout,
    manifest: &DatasetManifest,
    entry: &ManifestEntry,
    opts: &MetricOptions,
) -> Result<MetricReport, PipelineError> {
    let sx = Ratio::new(entry.width as i64, layout.canvas().w());
    let sy = Ratio::new(entry.height as i64, layout.canvas().h());
    let scaled = scale_layout(layout, sx, sy)
        .map_err(|e| PipelineError::Dataset(format!("cannot scale layout: {e}")))?;
    let background = load_gray_image(&manifest.image_path(entry))?;
    let (map, source) = sample_saliency(manifest, entry, &background)?;
    let inputs = ScoreInputs {
        saliency: Some((&map, source)),
        background: Some(&background),
    };
    Ok(score_layout(&scaled, &inputs, opts)?)
}
