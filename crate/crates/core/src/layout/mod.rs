//! Layout domain types, exact rectangle algebra, and the constrained-HTML
//! codec that serves as the wire format between the model and the toolkit.

mod codec;
mod constraint;
mod rect;
mod types;
mod validity;

pub use codec::{
    extract_html_block, parse_layout_html, salvage_layout_html, serialize_layout_html, CodecError,
    ParsedLayout,
};
pub use constraint::{ConstraintError, ElementConstraint};
pub use rect::{contains, intersect_area, iou, GeometryError, Rect};
pub use types::{Category, Element, Layout, LayoutError};
pub use validity::{check_validity, scale_layout, ElementValidity, ValidityReport};

/// Default "too small" threshold: an element is degenerate when its area is
/// below canvas_area / 1000.
pub const DEFAULT_MIN_AREA_RATIO: (i64, i64) = (1, 1000);
