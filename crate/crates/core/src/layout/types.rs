use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rect::{GeometryError, Rect};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("canvas must sit at the origin with positive size (got {x},{y} {w}x{h})")]
    InvalidCanvas { x: i64, y: i64, w: i64, h: i64 },
    #[error("`canvas` is not a placeable element category")]
    CanvasElement,
    #[error("duplicate element index {0}")]
    DuplicateIndex(u32),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Element classes. `Canvas` only ever appears as the backing div in the
/// HTML form, never as a placeable element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Logo,
    Text,
    Underlay,
    Canvas,
}

impl Category {
    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Logo => "logo",
            Category::Text => "text",
            Category::Underlay => "underlay",
            Category::Canvas => "canvas",
        }
    }

    /// The three placeable categories in canonical order.
    pub const PLACEABLE: [Category; 3] = [Category::Logo, Category::Text, Category::Underlay];
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "logo" => Ok(Category::Logo),
            "text" => Ok(Category::Text),
            "underlay" => Ok(Category::Underlay),
            "canvas" => Ok(Category::Canvas),
            _ => Err(()),
        }
    }
}

/// One layout box: a placeable category plus its rectangle, identified
/// within the layout by `index` (the naming used in constraints and plans,
/// e.g. "text 0").
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawElement")]
pub struct Element {
    category: Category,
    index: u32,
    #[serde(flatten)]
    rect: Rect,
}

#[derive(Deserialize)]
struct RawElement {
    category: Category,
    index: u32,
    #[serde(flatten)]
    rect: Rect,
}

impl TryFrom<RawElement> for Element {
    type Error = LayoutError;

    fn try_from(e: RawElement) -> Result<Self, LayoutError> {
        Element::new(e.category, e.index, e.rect)
    }
}

impl Element {
    pub fn new(category: Category, index: u32, rect: Rect) -> Result<Self, LayoutError> {
        if category == Category::Canvas {
            return Err(LayoutError::CanvasElement);
        }
        Ok(Self { category, index, rect })
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn rect(&self) -> &Rect {
        &self.rect
    }
}

/// An ordered list of elements over a canvas anchored at the origin.
/// Element order is document order and survives the codec round-trip.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLayout")]
pub struct Layout {
    canvas: Rect,
    elements: Vec<Element>,
}

#[derive(Deserialize)]
struct RawLayout {
    canvas: Rect,
    elements: Vec<Element>,
}

impl TryFrom<RawLayout> for Layout {
    type Error = LayoutError;

    fn try_from(l: RawLayout) -> Result<Self, LayoutError> {
        Layout::new(l.canvas, l.elements)
    }
}

impl Layout {
    pub fn new(canvas: Rect, elements: Vec<Element>) -> Result<Self, LayoutError> {
        if canvas.x() != 0 || canvas.y() != 0 || canvas.w() <= 0 || canvas.h() <= 0 {
            return Err(LayoutError::InvalidCanvas {
                x: canvas.x(),
                y: canvas.y(),
                w: canvas.w(),
                h: canvas.h(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &elements {
            if !seen.insert(e.index()) {
                return Err(LayoutError::DuplicateIndex(e.index()));
            }
        }
        Ok(Self { canvas, elements })
    }

    pub fn empty(canvas: Rect) -> Result<Self, LayoutError> {
        Self::new(canvas, Vec::new())
    }

    pub fn canvas(&self) -> &Rect {
        &self.canvas
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements of one category, in document order.
    pub fn of_category(&self, category: Category) -> impl Iterator<Item = &Element> {
        self.elements.iter().filter(move |e| e.category() == category)
    }
}
