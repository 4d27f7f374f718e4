//! Core building blocks for banner-ad layout generation and evaluation:
//! layout domain types with exact integer rectangle algebra, the
//! constrained-HTML codec used as the model wire format, saliency map
//! computation and loading, and the rule-based layout quality metrics.

pub mod layout;
pub mod metrics;
pub mod saliency;

/// Canvas the model is prompted with, in pixels. Layouts are scaled from
/// this grid onto the native background resolution for pixel metrics.
pub const PROMPT_CANVAS_W: i64 = 102;
/// See [`PROMPT_CANVAS_W`].
pub const PROMPT_CANVAS_H: i64 = 150;
