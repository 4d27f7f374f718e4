use serde::{Deserialize, Serialize};

use crate::layout::{contains, Category, ElementConstraint, Layout};

/// Constraint-checker verdict for one layout: does the element multiset
/// match the request, and does every underlay actually back something.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub constraint_mismatch: bool,
    /// Indices of underlays that contain no text or logo element.
    pub orphan_underlays: Vec<u32>,
    pub has_violation: bool,
}

/// Compare the layout's (category, index) multiset against the constraint
/// and flag underlays that fail to fully contain any text/logo element.
pub fn check_violations(layout: &Layout, constraint: &ElementConstraint) -> ViolationReport {
    let mut layout_pairs: Vec<(Category, u32)> =
        layout.elements().iter().map(|e| (e.category(), e.index())).collect();
    layout_pairs.sort();
    let constraint_mismatch = layout_pairs != constraint.sorted_pairs();

    let non_underlays: Vec<_> = layout
        .elements()
        .iter()
        .filter(|e| e.category() != Category::Underlay)
        .collect();
    let mut orphan_underlays = Vec::new();
    for u in layout.of_category(Category::Underlay) {
        let backs_something = non_underlays.iter().any(|e| contains(u.rect(), e.rect()));
        if !backs_something {
            orphan_underlays.push(u.index());
        }
    }
    let has_violation = constraint_mismatch || !orphan_underlays.is_empty();
    ViolationReport { constraint_mismatch, orphan_underlays, has_violation }
}
