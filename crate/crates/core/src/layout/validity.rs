use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::rect::{intersect_area, GeometryError};
use super::types::{Element, Layout, LayoutError};

/// Per-element validity flags plus the layout score.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub flags: Vec<ElementValidity>,
    pub valid_count: usize,
    pub total_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementValidity {
    pub index: u32,
    pub too_small: bool,
    pub out_of_canvas: bool,
}

impl ElementValidity {
    pub fn is_valid(&self) -> bool {
        !self.too_small && !self.out_of_canvas
    }
}

impl ValidityReport {
    /// Proportion of valid elements; an empty layout scores 1 so that
    /// aggregation never divides by zero.
    pub fn score(&self) -> f64 {
        if self.total_count == 0 {
            1.0
        } else {
            self.valid_count as f64 / self.total_count as f64
        }
    }
}

/// Flag elements that are too small (area below `min_area_ratio` of the
/// canvas area) or that stick out of the canvas. Comparisons are exact
/// integer arithmetic.
pub fn check_validity(layout: &Layout, min_area_ratio: Ratio<i64>) -> ValidityReport {
    let canvas = layout.canvas();
    let canvas_area = canvas.area() as i128;
    let num = *min_area_ratio.numer() as i128;
    let den = *min_area_ratio.denom() as i128;
    let mut flags = Vec::with_capacity(layout.len());
    let mut valid_count = 0;
    for e in layout.elements() {
        let area = e.rect().area();
        // area < ratio * canvas_area  <=>  area * den < num * canvas_area
        let too_small = (area as i128) * den < num * canvas_area;
        let out_of_canvas = intersect_area(e.rect(), canvas) < area;
        let flag = ElementValidity { index: e.index(), too_small, out_of_canvas };
        if flag.is_valid() {
            valid_count += 1;
        }
        flags.push(flag);
    }
    ValidityReport { flags, valid_count, total_count: layout.len() }
}

/// Scale a layout (canvas and elements) by exact rational factors, rounding
/// half-up. Used to map the prompt canvas onto full-resolution backgrounds.
pub fn scale_layout(layout: &Layout, sx: Ratio<i64>, sy: Ratio<i64>) -> Result<Layout, LayoutError> {
    if sx <= Ratio::from_integer(0) || sy <= Ratio::from_integer(0) {
        return Err(LayoutError::Geometry(GeometryError::NonPositiveScale));
    }
    let canvas = layout.canvas().scaled(sx, sy)?;
    let elements = layout
        .elements()
        .iter()
        .map(|e| Ok(Element::new(e.category(), e.index(), e.rect().scaled(sx, sy)?)?))
        .collect::<Result<Vec<_>, LayoutError>>()?;
    Layout::new(canvas, elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{Category, Rect};

    fn rect(x: i64, y: i64, w: i64, h: i64) -> Rect {
        Rect::new(x, y, w, h).unwrap()
    }

    fn layout(elements: Vec<(Category, i64, i64, i64, i64)>) -> Layout {
        let elements = elements
            .into_iter()
            .enumerate()
            .map(|(i, (c, x, y, w, h))| Element::new(c, i as u32, rect(x, y, w, h)).unwrap())
            .collect();
        Layout::new(rect(0, 0, 102, 150), elements).unwrap()
    }

    fn ratio(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn reference_layout_is_fully_valid() {
        let l = layout(vec![
            (Category::Text, 2, 113, 95, 10),
            (Category::Text, 2, 124, 95, 9),
            (Category::Underlay, 0, 111, 102, 24),
        ]);
        let report = check_validity(&l, ratio(1, 1000));
        assert_eq!(report.score(), 1.0);
        assert!(report.flags.iter().all(|f| f.is_valid()));
    }

    #[test]
    fn out_of_canvas_element() {
        let l = layout(vec![(Category::Text, -5, 0, 10, 10)]);
        let report = check_validity(&l, ratio(1, 1000));
        assert_eq!(report.score(), 0.0);
        assert!(report.flags[0].out_of_canvas);
        assert!(!report.flags[0].too_small);
    }

    #[test]
    fn too_small_threshold_arithmetic() {
        // Canvas area 15300; ratio 1/1000 means threshold 15.3 px².
        let l = layout(vec![(Category::Text, 0, 0, 1, 1)]);
        let report = check_validity(&l, ratio(1, 1000));
        assert!(report.flags[0].too_small);
        // 16 px² clears the threshold.
        let l = layout(vec![(Category::Text, 0, 0, 4, 4)]);
        assert!(check_validity(&l, ratio(1, 1000)).flags[0].is_valid());
        // 15 px² does not (15 < 15.3).
        let l = layout(vec![(Category::Text, 0, 0, 5, 3)]);
        assert!(check_validity(&l, ratio(1, 1000)).flags[0].too_small);
    }

    #[test]
    fn empty_layout_scores_one() {
        let l = Layout::empty(rect(0, 0, 102, 150)).unwrap();
        assert_eq!(check_validity(&l, ratio(1, 1000)).score(), 1.0);
    }

    #[test]
    fn shrinking_ratio_never_decreases_score() {
        let l = layout(vec![
            (Category::Text, 0, 0, 1, 1),
            (Category::Text, 0, 20, 4, 4),
            (Category::Underlay, 0, 100, 102, 50),
            (Category::Logo, 90, 140, 30, 30),
        ]);
        // Strictest ratio first; the score must be non-decreasing as the
        // threshold shrinks.
        let ratios = [ratio(1, 10), ratio(1, 100), ratio(1, 1000), ratio(1, 100_000), ratio(0, 1)];
        let mut last = -1.0;
        for r in &ratios {
            let score = check_validity(&l, *r).score();
            assert!(score >= last, "score must not drop as the ratio shrinks");
            last = score;
        }
    }

    #[test]
    fn scale_identity_and_factor_five() {
        let l = layout(vec![(Category::Text, 2, 113, 95, 10)]);
        let same = scale_layout(&l, ratio(1, 1), ratio(1, 1)).unwrap();
        assert_eq!(same, l);
        let scaled = scale_layout(&l, ratio(5, 1), ratio(5, 1)).unwrap();
        assert_eq!(scaled.canvas(), &rect(0, 0, 510, 750));
        assert_eq!(scaled.elements()[0].rect(), &rect(10, 565, 475, 50));
    }

    #[test]
    fn scale_onto_native_resolution_is_exact_on_canvas() {
        let l = Layout::empty(rect(0, 0, 102, 150)).unwrap();
        let scaled = scale_layout(&l, ratio(513, 102), ratio(750, 150)).unwrap();
        assert_eq!(scaled.canvas(), &rect(0, 0, 513, 750));
    }
}
