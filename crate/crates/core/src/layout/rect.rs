use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("rectangle dimensions must be non-negative (got w={w}, h={h})")]
    NegativeDimension { w: i64, h: i64 },
    #[error("IoU is undefined when both rectangles have zero area")]
    DegenerateIou,
    #[error("scale factors must be positive")]
    NonPositiveScale,
}

/// Axis-aligned rectangle in integer pixel coordinates. `x`/`y` locate the
/// top-left corner; width and height are non-negative (zero allowed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRect")]
pub struct Rect {
    x: i64,
    y: i64,
    w: i64,
    h: i64,
}

#[derive(Deserialize)]
struct RawRect {
    x: i64,
    y: i64,
    w: i64,
    h: i64,
}

impl TryFrom<RawRect> for Rect {
    type Error = GeometryError;

    fn try_from(r: RawRect) -> Result<Self, GeometryError> {
        Rect::new(r.x, r.y, r.w, r.h)
    }
}

impl Rect {
    pub fn new(x: i64, y: i64, w: i64, h: i64) -> Result<Self, GeometryError> {
        if w < 0 || h < 0 {
            return Err(GeometryError::NegativeDimension { w, h });
        }
        Ok(Self { x, y, w, h })
    }

    pub fn x(&self) -> i64 {
        self.x
    }

    pub fn y(&self) -> i64 {
        self.y
    }

    pub fn w(&self) -> i64 {
        self.w
    }

    pub fn h(&self) -> i64 {
        self.h
    }

    pub fn right(&self) -> i64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> i64 {
        self.y + self.h
    }

    pub fn area(&self) -> i64 {
        self.w * self.h
    }

    pub fn is_empty(&self) -> bool {
        self.w == 0 || self.h == 0
    }

    /// Scale both axes by exact rational factors, rounding each resulting
    /// coordinate half-up to an integer pixel.
    pub fn scaled(&self, sx: Ratio<i64>, sy: Ratio<i64>) -> Result<Rect, GeometryError> {
        if sx <= Ratio::from_integer(0) || sy <= Ratio::from_integer(0) {
            return Err(GeometryError::NonPositiveScale);
        }
        Rect::new(
            round_half_up(Ratio::from_integer(self.x) * sx),
            round_half_up(Ratio::from_integer(self.y) * sy),
            round_half_up(Ratio::from_integer(self.w) * sx),
            round_half_up(Ratio::from_integer(self.h) * sy),
        )
    }
}

/// Round half-up (toward positive infinity on ties): `floor(v + 1/2)`.
pub(crate) fn round_half_up(v: Ratio<i64>) -> i64 {
    (v + Ratio::new(1, 2)).floor().to_integer()
}

/// Exact area of the geometric intersection, in px². Commutative; rectangles
/// that only touch along an edge have empty interior overlap.
pub fn intersect_area(a: &Rect, b: &Rect) -> i64 {
    let iw = a.right().min(b.right()) - a.x().max(b.x());
    let ih = a.bottom().min(b.bottom()) - a.y().max(b.y());
    if iw <= 0 || ih <= 0 {
        0
    } else {
        iw * ih
    }
}

/// True iff `inner` lies entirely within `outer` (boundaries may touch).
/// Every rectangle contains itself.
pub fn contains(outer: &Rect, inner: &Rect) -> bool {
    inner.x() >= outer.x()
        && inner.y() >= outer.y()
        && inner.right() <= outer.right()
        && inner.bottom() <= outer.bottom()
}

/// Exact intersection-over-union. Errors when both rectangles have zero
/// area; a single zero-area rectangle yields 0.
pub fn iou(a: &Rect, b: &Rect) -> Result<Ratio<i64>, GeometryError> {
    let inter = intersect_area(a, b);
    let union = a.area() + b.area() - inter;
    if union == 0 {
        return Err(GeometryError::DegenerateIou);
    }
    Ok(Ratio::new(inter, union))
}
