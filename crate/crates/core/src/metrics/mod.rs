//! The eight rule-based layout metrics plus the constraint-violation
//! checker, each a pure function of a layout (and a saliency map or
//! background where needed).

mod aggregate;
mod report;
mod rules;
mod violations;

pub use aggregate::{aggregate, violation_rate};
pub use report::{MetricReport, Provenance, SaliencySource, UtilityDenominator};
pub use rules::{
    metric_alignment, metric_occlusion, metric_overlap, metric_underlay, metric_unreadability,
    metric_utility, metric_validity, score_layout, MetricOptions, ScoreInputs, UnderlayScores,
};
pub use violations::{check_violations, ViolationReport};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("grid mismatch: layout canvas is {canvas_w}x{canvas_h} but grid is {grid_w}x{grid_h}")]
    GridMismatch { canvas_w: i64, canvas_h: i64, grid_w: usize, grid_h: usize },
    #[error("cannot aggregate an empty report list")]
    EmptyAggregate,
    #[error("salience threshold {0} is outside [0, 1]")]
    BadThreshold(f64),
}

/// Metric column names in report order.
pub const TABLE_COLUMNS: [&str; 8] = ["Val", "Ove", "Ali", "Und_l", "Und_s", "Uti", "Occ", "Rea"];
