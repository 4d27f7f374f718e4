use num_rational::Ratio;

use crate::layout::{
    check_validity, contains, intersect_area, Category, Layout, Rect, DEFAULT_MIN_AREA_RATIO,
};
use crate::saliency::{threshold_mask, BinaryMask, GrayImage, SaliencyMap, DEFAULT_THETA};

use super::report::{MetricReport, Provenance, SaliencySource, UtilityDenominator};
use super::MetricsError;

/// Knobs shared by the metric suite.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricOptions {
    pub min_area_ratio: Ratio<i64>,
    pub theta: f64,
    pub utility_denominator: UtilityDenominator,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self {
            min_area_ratio: Ratio::new(DEFAULT_MIN_AREA_RATIO.0, DEFAULT_MIN_AREA_RATIO.1),
            theta: DEFAULT_THETA,
            utility_denominator: UtilityDenominator::default(),
        }
    }
}

/// Proportion of valid elements (not too small, not outside the canvas).
pub fn metric_validity(layout: &Layout, min_area_ratio: Ratio<i64>) -> f64 {
    check_validity(layout, min_area_ratio).score()
}

/// Mean pairwise IoU over non-underlay elements; fewer than two -> 0.
/// A pair in which both rectangles are zero-area contributes 0.
pub fn metric_overlap(layout: &Layout) -> f64 {
    let boxes: Vec<&Rect> = layout
        .elements()
        .iter()
        .filter(|e| e.category() != Category::Underlay)
        .map(|e| e.rect())
        .collect();
    if boxes.len() < 2 {
        return 0.0;
    }
    let mut sum = 0.0f64;
    let mut pairs = 0usize;
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            let inter = intersect_area(boxes[i], boxes[j]);
            let union = boxes[i].area() + boxes[j].area() - inter;
            sum += if union == 0 { 0.0 } else { inter as f64 / union as f64 };
            pairs += 1;
        }
    }
    sum / pairs as f64
}

/// Six alignment axes of a rectangle in integer pixels. Centers use floor
/// division so the whole computation stays in exact integer arithmetic.
fn axes(r: &Rect) -> [i64; 6] {
    [
        r.x(),
        r.x() + r.w() / 2,
        r.right(),
        r.y(),
        r.y() + r.h() / 2,
        r.bottom(),
    ]
}

/// Mean over elements of -ln(1 - d) where d is the nearest-axis distance
/// to any other element (left/center/right x, top/center/bottom y),
/// normalized by the canvas width. Fewer than two elements -> 0.
pub fn metric_alignment(layout: &Layout) -> f64 {
    let n = layout.len();
    if n < 2 {
        return 0.0;
    }
    let canvas_w = layout.canvas().w() as f64;
    let axis_table: Vec<[i64; 6]> = layout.elements().iter().map(|e| axes(e.rect())).collect();
    let mut sum = 0.0f64;
    for i in 0..n {
        let mut best = i64::MAX;
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..3 {
                best = best.min((axis_table[i][k] - axis_table[j][k]).abs());
            }
            for k in 3..6 {
                best = best.min((axis_table[i][k] - axis_table[j][k]).abs());
            }
        }
        let delta = (best as f64 / canvas_w).min(1.0 - 1e-6);
        sum += -(1.0 - delta).ln();
    }
    sum / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnderlayScores {
    pub loose: Option<f64>,
    pub strict: Option<f64>,
}

/// Per-underlay containment of non-underlay elements: loose is the best
/// covered-area fraction of any element, strict is all-or-nothing full
/// containment. Layout scores are means over underlays; a layout without
/// underlays has no score. Zero-area elements are skipped on both sides
/// (their covered fraction is undefined and a degenerate sliver does not
/// count as "backed"), which keeps strict <= loose.
pub fn metric_underlay(layout: &Layout) -> UnderlayScores {
    let underlays: Vec<&Rect> = layout
        .of_category(Category::Underlay)
        .map(|e| e.rect())
        .collect();
    if underlays.is_empty() {
        return UnderlayScores { loose: None, strict: None };
    }
    let others: Vec<&Rect> = layout
        .elements()
        .iter()
        .filter(|e| e.category() != Category::Underlay)
        .map(|e| e.rect())
        .collect();
    let mut loose_sum = 0.0f64;
    let mut strict_sum = 0.0f64;
    for u in &underlays {
        let mut best = 0.0f64;
        let mut covered = false;
        for e in &others {
            if e.area() == 0 {
                log::debug!("skipping zero-area element in underlay scoring");
                continue;
            }
            best = best.max(intersect_area(u, e) as f64 / e.area() as f64);
            if contains(u, e) {
                covered = true;
            }
        }
        loose_sum += best;
        strict_sum += if covered { 1.0 } else { 0.0 };
    }
    let n = underlays.len() as f64;
    UnderlayScores { loose: Some(loose_sum / n), strict: Some(strict_sum / n) }
}

fn require_grid(layout: &Layout, grid_w: usize, grid_h: usize) -> Result<(), MetricsError> {
    let c = layout.canvas();
    if c.w() != grid_w as i64 || c.h() != grid_h as i64 {
        return Err(MetricsError::GridMismatch {
            canvas_w: c.w(),
            canvas_h: c.h(),
            grid_w,
            grid_h,
        });
    }
    Ok(())
}

/// Boolean coverage grid of the given rectangles, clipped to the canvas.
fn coverage<'a>(rects: impl Iterator<Item = &'a Rect>, w: usize, h: usize) -> Vec<bool> {
    let mut grid = vec![false; w * h];
    for r in rects {
        let x0 = r.x().max(0) as usize;
        let y0 = r.y().max(0) as usize;
        let x1 = r.right().clamp(0, w as i64) as usize;
        let y1 = r.bottom().clamp(0, h as i64) as usize;
        for y in y0..y1 {
            grid[y * w + x0..y * w + x1].iter_mut().for_each(|b| *b = true);
        }
    }
    grid
}

/// Fraction of the non-salient area covered by the element union (or, with
/// the element-area denominator, the fraction of the element union that
/// sits on non-salient pixels). An empty denominator yields no score.
pub fn metric_utility(
    layout: &Layout,
    mask: &BinaryMask,
    denominator: UtilityDenominator,
) -> Result<Option<f64>, MetricsError> {
    require_grid(layout, mask.width(), mask.height())?;
    let union = coverage(layout.elements().iter().map(|e| e.rect()), mask.width(), mask.height());
    let mut covered_non_salient = 0u64;
    let mut non_salient = 0u64;
    let mut union_count = 0u64;
    for (covered, salient) in union.iter().zip(mask.bits()) {
        if !salient {
            non_salient += 1;
            if *covered {
                covered_non_salient += 1;
            }
        }
        if *covered {
            union_count += 1;
        }
    }
    Ok(match denominator {
        UtilityDenominator::NonSalientArea => {
            (non_salient > 0).then(|| covered_non_salient as f64 / non_salient as f64)
        }
        UtilityDenominator::ElementArea => {
            (union_count > 0).then(|| covered_non_salient as f64 / union_count as f64)
        }
    })
}

/// Mean saliency over the union of element pixels; no elements -> 0.
pub fn metric_occlusion(layout: &Layout, map: &SaliencyMap) -> Result<f64, MetricsError> {
    require_grid(layout, map.width(), map.height())?;
    let union = coverage(layout.elements().iter().map(|e| e.rect()), map.width(), map.height());
    let mut sum = 0.0f64;
    let mut count = 0u64;
    for (i, covered) in union.iter().enumerate() {
        if *covered {
            sum += map.values()[i] as f64;
            count += 1;
        }
    }
    Ok(if count == 0 { 0.0 } else { sum / count as f64 })
}

/// Mean normalized gradient magnitude of the background under text pixels
/// not covered by any underlay; empty pixel set -> 0. Gradients are raw
/// central differences, clamped lookups at the borders, magnitude scaled
/// by 1/sqrt(2) into [0, 1].
pub fn metric_unreadability(layout: &Layout, background: &GrayImage) -> Result<f64, MetricsError> {
    require_grid(layout, background.width(), background.height())?;
    let (w, h) = (background.width(), background.height());
    let text = coverage(layout.of_category(Category::Text).map(|e| e.rect()), w, h);
    let under = coverage(layout.of_category(Category::Underlay).map(|e| e.rect()), w, h);
    let mut sum = 0.0f64;
    let mut count = 0u64;
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !text[i] || under[i] {
                continue;
            }
            let gx = background.get_clamped(x as i64 + 1, y as i64) as f64
                - background.get_clamped(x as i64 - 1, y as i64) as f64;
            let gy = background.get_clamped(x as i64, y as i64 + 1) as f64
                - background.get_clamped(x as i64, y as i64 - 1) as f64;
            sum += ((gx * gx + gy * gy).sqrt() / std::f64::consts::SQRT_2).min(1.0);
            count += 1;
        }
    }
    Ok(if count == 0 { 0.0 } else { sum / count as f64 })
}

/// Inputs available for saliency- and background-dependent metrics.
#[derive(Default)]
pub struct ScoreInputs<'a> {
    pub saliency: Option<(&'a SaliencyMap, SaliencySource)>,
    pub background: Option<&'a GrayImage>,
}

/// Compute the full metric suite for one layout. The layout must already
/// be scaled to the grid of the supplied map/background.
pub fn score_layout(
    layout: &Layout,
    inputs: &ScoreInputs<'_>,
    opts: &MetricOptions,
) -> Result<MetricReport, MetricsError> {
    let underlay = metric_underlay(layout);
    let (utility, occlusion) = match inputs.saliency {
        Some((map, _)) => {
            let mask = threshold_mask(map, opts.theta)
                .map_err(|_| MetricsError::BadThreshold(opts.theta))?;
            (
                metric_utility(layout, &mask, opts.utility_denominator)?,
                Some(metric_occlusion(layout, map)?),
            )
        }
        None => (None, None),
    };
    let unreadability = match inputs.background {
        Some(bg) => Some(metric_unreadability(layout, bg)?),
        None => None,
    };
    Ok(MetricReport {
        validity: metric_validity(layout, opts.min_area_ratio),
        overlap: metric_overlap(layout),
        alignment: metric_alignment(layout),
        underlay_loose: underlay.loose,
        underlay_strict: underlay.strict,
        utility,
        occlusion,
        unreadability,
        provenance: Provenance {
            saliency_source: inputs.saliency.map(|(_, s)| s),
            theta: opts.theta,
            min_area_ratio: format!(
                "{}/{}",
                opts.min_area_ratio.numer(),
                opts.min_area_ratio.denom()
            ),
            utility_denominator: opts.utility_denominator,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::Element;

    fn rect(x: i64, y: i64, w: i64, h: i64) -> Rect {
        Rect::new(x, y, w, h).unwrap()
    }

    fn layout_on(canvas_w: i64, canvas_h: i64, spec: &[(Category, i64, i64, i64, i64)]) -> Layout {
        let elements = spec
            .iter()
            .enumerate()
            .map(|(i, &(c, x, y, w, h))| Element::new(c, i as u32, rect(x, y, w, h)).unwrap())
            .collect();
        Layout::new(rect(0, 0, canvas_w, canvas_h), elements).unwrap()
    }

    fn table_layout() -> Layout {
        layout_on(
            102,
            150,
            &[
                (Category::Text, 2, 113, 95, 10),
                (Category::Text, 2, 124, 95, 9),
                (Category::Underlay, 0, 111, 102, 24),
            ],
        )
    }

    #[test]
    fn validity_counts() {
        let opts = MetricOptions::default();
        assert_eq!(metric_validity(&table_layout(), opts.min_area_ratio), 1.0);
        let empty = Layout::empty(rect(0, 0, 102, 150)).unwrap();
        assert_eq!(metric_validity(&empty, opts.min_area_ratio), 1.0);
        let half = layout_on(
            102,
            150,
            &[(Category::Text, 0, 0, 20, 20), (Category::Text, -5, 0, 20, 20)],
        );
        assert_eq!(metric_validity(&half, opts.min_area_ratio), 0.5);
    }

    #[test]
    fn overlap_reference_cases() {
        // The two texts are disjoint (rows 113..123 vs 124..133).
        assert_eq!(metric_overlap(&table_layout()), 0.0);
        let identical = layout_on(
            102,
            150,
            &[(Category::Text, 10, 10, 30, 20), (Category::Text, 10, 10, 30, 20)],
        );
        assert_eq!(metric_overlap(&identical), 1.0);
        let three = layout_on(
            102,
            150,
            &[
                (Category::Text, 0, 0, 10, 10),
                (Category::Text, 5, 0, 10, 10),
                (Category::Text, 20, 0, 10, 10),
            ],
        );
        assert!((metric_overlap(&three) - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_ignores_underlays_and_singletons() {
        let single = layout_on(102, 150, &[(Category::Text, 0, 0, 10, 10)]);
        assert_eq!(metric_overlap(&single), 0.0);
        let with_underlay = layout_on(
            102,
            150,
            &[(Category::Text, 0, 0, 10, 10), (Category::Underlay, 0, 0, 102, 150)],
        );
        assert_eq!(metric_overlap(&with_underlay), 0.0);
    }

    #[test]
    fn alignment_reference_value() {
        // Texts share left=2 and width; the underlay's nearest axis gap is
        // 2px (top 111 vs 113, left 0 vs 2, floor centers 51 vs 49), so the
        // score is -ln(1 - 2/102)/3 = 0.006600875765... exactly.
        let expected = -(1.0f64 - 2.0 / 102.0).ln() / 3.0;
        let got = metric_alignment(&table_layout());
        assert!((got - expected).abs() < 1e-12, "got {got}, expected {expected}");
        assert!((got - 0.0066008758).abs() < 1e-9);
    }

    #[test]
    fn alignment_degenerate_cases() {
        let single = layout_on(102, 150, &[(Category::Text, 5, 5, 10, 10)]);
        assert_eq!(metric_alignment(&single), 0.0);
        let aligned = layout_on(
            102,
            150,
            &[(Category::Text, 7, 10, 30, 10), (Category::Text, 7, 40, 50, 10)],
        );
        assert_eq!(metric_alignment(&aligned), 0.0);
    }

    #[test]
    fn underlay_reference_cases() {
        let scores = metric_underlay(&table_layout());
        assert_eq!(scores.loose, Some(1.0));
        assert_eq!(scores.strict, Some(1.0));

        let none = layout_on(102, 150, &[(Category::Text, 0, 0, 10, 10)]);
        let scores = metric_underlay(&none);
        assert_eq!(scores.loose, None);
        assert_eq!(scores.strict, None);

        let partial = layout_on(
            102,
            150,
            &[(Category::Underlay, 0, 0, 10, 10), (Category::Text, 5, 5, 10, 10)],
        );
        let scores = metric_underlay(&partial);
        assert_eq!(scores.loose, Some(0.25));
        assert_eq!(scores.strict, Some(0.0));
    }

    #[test]
    fn underlay_strict_never_exceeds_loose() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let mut spec = Vec::new();
            for _ in 0..rng.gen_range(1..6) {
                let c = match rng.gen_range(0..3) {
                    0 => Category::Logo,
                    1 => Category::Text,
                    _ => Category::Underlay,
                };
                spec.push((
                    c,
                    rng.gen_range(-10..100),
                    rng.gen_range(-10..140),
                    rng.gen_range(0..60),
                    rng.gen_range(0..60),
                ));
            }
            let layout = layout_on(102, 150, &spec);
            let scores = metric_underlay(&layout);
            if let (Some(loose), Some(strict)) = (scores.loose, scores.strict) {
                assert!(strict <= loose + 1e-12, "strict {strict} > loose {loose}");
            }
        }
    }

    fn mask_left_half(w: usize, h: usize) -> BinaryMask {
        // Left half non-salient, right half salient.
        let bits = (0..w * h).map(|i| i % w >= w / 2).collect();
        BinaryMask::new(w, h, bits).unwrap()
    }

    #[test]
    fn utility_reference_cases() {
        let layout = layout_on(10, 10, &[(Category::Text, 0, 0, 5, 10)]);
        let mask = mask_left_half(10, 10);
        let got = metric_utility(&layout, &mask, UtilityDenominator::NonSalientArea).unwrap();
        assert_eq!(got, Some(1.0));

        let all_salient = BinaryMask::new(10, 10, vec![true; 100]).unwrap();
        assert_eq!(
            metric_utility(&layout, &all_salient, UtilityDenominator::NonSalientArea).unwrap(),
            None
        );

        let empty = Layout::empty(rect(0, 0, 10, 10)).unwrap();
        assert_eq!(
            metric_utility(&empty, &mask, UtilityDenominator::NonSalientArea).unwrap(),
            Some(0.0)
        );

        // Element-area denominator variant.
        let straddling = layout_on(10, 10, &[(Category::Text, 3, 0, 4, 10)]);
        assert_eq!(
            metric_utility(&straddling, &mask, UtilityDenominator::ElementArea).unwrap(),
            Some(0.5)
        );
        assert_eq!(
            metric_utility(&empty, &mask, UtilityDenominator::ElementArea).unwrap(),
            None
        );
    }

    #[test]
    fn utility_grid_mismatch() {
        let layout = layout_on(102, 150, &[(Category::Text, 0, 0, 5, 5)]);
        let mask = mask_left_half(10, 10);
        assert!(matches!(
            metric_utility(&layout, &mask, UtilityDenominator::NonSalientArea),
            Err(MetricsError::GridMismatch { .. })
        ));
    }

    #[test]
    fn occlusion_reference_cases() {
        let layout = layout_on(10, 10, &[(Category::Text, 2, 2, 4, 4)]);
        let zero = SaliencyMap::new(10, 10, vec![0.0; 100]).unwrap();
        assert_eq!(metric_occlusion(&layout, &zero).unwrap(), 0.0);
        let one = SaliencyMap::new(10, 10, vec![1.0; 100]).unwrap();
        assert_eq!(metric_occlusion(&layout, &one).unwrap(), 1.0);

        // Half-zero/half-one map, element covering equal pixel counts.
        let values: Vec<f32> = (0..100).map(|i| if i % 10 >= 5 { 1.0 } else { 0.0 }).collect();
        let half = SaliencyMap::new(10, 10, values).unwrap();
        let straddling = layout_on(10, 10, &[(Category::Text, 3, 0, 4, 10)]);
        assert_eq!(metric_occlusion(&straddling, &half).unwrap(), 0.5);

        let empty = Layout::empty(rect(0, 0, 10, 10)).unwrap();
        assert_eq!(metric_occlusion(&empty, &one).unwrap(), 0.0);
    }

    #[test]
    fn unreadability_reference_cases() {
        let flat = GrayImage::new(10, 10, vec![0.4; 100]).unwrap();
        let layout = layout_on(10, 10, &[(Category::Text, 2, 2, 4, 4)]);
        assert_eq!(metric_unreadability(&layout, &flat).unwrap(), 0.0);

        // Text fully covered by an underlay -> empty pixel set -> 0.
        let covered = layout_on(
            10,
            10,
            &[(Category::Text, 2, 2, 4, 4), (Category::Underlay, 0, 0, 10, 10)],
        );
        let step = {
            let mut px = vec![0.0f32; 100];
            for y in 0..10 {
                for x in 5..10 {
                    px[y * 10 + x] = 1.0;
                }
            }
            GrayImage::new(10, 10, px).unwrap()
        };
        assert_eq!(metric_unreadability(&covered, &step).unwrap(), 0.0);

        // Vertical step edge (0 -> 1 at column 5) crossing a 4px-wide text
        // box spanning columns 3..7. Central-difference oracle: columns 4
        // and 5 carry |gx| = 1 -> g = 1/sqrt(2); columns 3 and 6 are flat.
        let box_on_edge = layout_on(10, 10, &[(Category::Text, 3, 0, 4, 10)]);
        let expected = {
            let mut sum = 0.0f64;
            let mut count = 0u64;
            for y in 0..10i64 {
                for x in 3..7i64 {
                    let sample = |xx: i64, yy: i64| -> f64 {
                        let xx = xx.clamp(0, 9) as usize;
                        let yy = yy.clamp(0, 9) as usize;
                        step.get(xx, yy) as f64
                    };
                    let gx = sample(x + 1, y) - sample(x - 1, y);
                    let gy = sample(x, y + 1) - sample(x, y - 1);
                    sum += ((gx * gx + gy * gy).sqrt() / std::f64::consts::SQRT_2).min(1.0);
                    count += 1;
                }
            }
            sum / count as f64
        };
        let got = metric_unreadability(&box_on_edge, &step).unwrap();
        assert!((got - expected).abs() < 1e-15);
        // Two of four columns on the edge at 1/sqrt(2) each.
        assert!((got - 0.5 / std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn metrics_are_permutation_invariant() {
        use rand::{seq::SliceRandom, SeedableRng};
        let spec = [
            (Category::Text, 2, 113, 95, 10),
            (Category::Text, 2, 124, 95, 9),
            (Category::Logo, 5, 5, 20, 20),
            (Category::Underlay, 0, 111, 102, 24),
        ];
        let base = layout_on(102, 150, &spec);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let mut shuffled = spec.to_vec();
            shuffled.shuffle(&mut rng);
            let layout = layout_on(102, 150, &shuffled);
            assert_eq!(metric_overlap(&layout), metric_overlap(&base));
            assert_eq!(metric_alignment(&layout), metric_alignment(&base));
        }
    }
}
