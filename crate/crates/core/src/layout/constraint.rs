use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::types::{Category, Layout};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("constraint entries must be numbered 0..N-1 in order (saw {category} {index} at position {position})")]
    BadIndex { category: Category, index: u32, position: usize },
    #[error("`canvas` cannot appear in an element constraint")]
    CanvasEntry,
    #[error("cannot parse constraint entry {0:?}")]
    Unparseable(String),
}

/// The requested multiset of elements, rendered in prompts as
/// `text 0 | text 1 | underlay 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ElementConstraint {
    items: Vec<(Category, u32)>,
}

impl ElementConstraint {
    /// Entries must carry indices 0..N-1 in order and placeable categories.
    pub fn new(items: Vec<(Category, u32)>) -> Result<Self, ConstraintError> {
        for (position, &(category, index)) in items.iter().enumerate() {
            if category == Category::Canvas {
                return Err(ConstraintError::CanvasEntry);
            }
            if index as usize != position {
                return Err(ConstraintError::BadIndex { category, index, position });
            }
        }
        Ok(Self { items })
    }

    /// Build from a bag of categories: canonical logo < text < underlay
    /// order, indices renumbered 0..N-1.
    pub fn from_categories(categories: &[Category]) -> Result<Self, ConstraintError> {
        let mut sorted: Vec<Category> = categories.to_vec();
        sorted.sort();
        Self::new(sorted.into_iter().enumerate().map(|(i, c)| (c, i as u32)).collect())
    }

    /// The constraint a layout satisfies by construction: its own
    /// (category, index) pairs in index order.
    pub fn of_layout(layout: &Layout) -> Self {
        let mut items: Vec<(Category, u32)> =
            layout.elements().iter().map(|e| (e.category(), e.index())).collect();
        items.sort_by_key(|&(_, i)| i);
        Self { items }
    }

    pub fn items(&self) -> &[(Category, u32)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, category: Category, index: u32) -> bool {
        self.items.iter().any(|&(c, i)| c == category && i == index)
    }

    /// Multiset of (category, index) pairs, sorted for comparison.
    pub fn sorted_pairs(&self) -> Vec<(Category, u32)> {
        let mut v = self.items.clone();
        v.sort();
        v
    }
}

impl fmt::Display for ElementConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> =
            self.items.iter().map(|(c, i)| format!("{c} {i}")).collect();
        f.write_str(&rendered.join(" | "))
    }
}

impl FromStr for ElementConstraint {
    type Err = ConstraintError;

    fn from_str(s: &str) -> Result<Self, ConstraintError> {
        let mut items = Vec::new();
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Self::new(items);
        }
        for entry in trimmed.split('|') {
            let entry = entry.trim();
            let mut parts = entry.split_whitespace();
            let category = parts
                .next()
                .and_then(|w| w.parse::<Category>().ok())
                .ok_or_else(|| ConstraintError::Unparseable(entry.to_string()))?;
            let index = parts
                .next()
                .and_then(|w| w.parse::<u32>().ok())
                .ok_or_else(|| ConstraintError::Unparseable(entry.to_string()))?;
            if parts.next().is_some() {
                return Err(ConstraintError::Unparseable(entry.to_string()));
            }
            items.push((category, index));
        }
        Self::new(items)
    }
}

impl TryFrom<String> for ElementConstraint {
    type Error = ConstraintError;

    fn try_from(s: String) -> Result<Self, ConstraintError> {
        s.parse()
    }
}

impl From<ElementConstraint> for String {
    fn from(c: ElementConstraint) -> String {
        c.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_with_pipe_separators() {
        let c = ElementConstraint::new(vec![
            (Category::Text, 0),
            (Category::Text, 1),
            (Category::Underlay, 2),
        ])
        .unwrap();
        assert_eq!(c.to_string(), "text 0 | text 1 | underlay 2");
    }

    #[test]
    fn parse_round_trip() {
        let c: ElementConstraint = "logo 0 | text 1 | text 2 | text 3 | underlay 4".parse().unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(c.to_string(), "logo 0 | text 1 | text 2 | text 3 | underlay 4");
    }

    #[test]
    fn indices_must_be_sequential() {
        assert!("text 0 | underlay 2".parse::<ElementConstraint>().is_err());
        assert!("text 1".parse::<ElementConstraint>().is_err());
        assert!("canvas 0".parse::<ElementConstraint>().is_err());
    }

    #[test]
    fn from_categories_sorts_canonically() {
        let c = ElementConstraint::from_categories(&[
            Category::Underlay,
            Category::Text,
            Category::Logo,
            Category::Text,
        ])
        .unwrap();
        assert_eq!(c.to_string(), "logo 0 | text 1 | text 2 | underlay 3");
    }
}
