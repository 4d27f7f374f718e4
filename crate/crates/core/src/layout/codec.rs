use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use super::rect::Rect;
use super::types::{Category, Element, Layout, LayoutError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("unknown element class {0:?}")]
    UnknownCategory(String),
    #[error("malformed style: {0}")]
    MalformedStyle(String),
    #[error("document has no canvas div and no expected canvas was supplied")]
    NoCanvas,
    #[error("negative dimension in {0}")]
    NegativeDimension(String),
    #[error("document contains more than one canvas div")]
    DuplicateCanvas,
    #[error("canvas div must sit at the origin with positive size")]
    InvalidCanvas,
    #[error("no HTML layout block found in model output")]
    NoLayoutFound,
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

/// Result of parsing a layout document. `coerced` is set when any style
/// value was fractional and had to be rounded half-up to an integer pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedLayout {
    pub layout: Layout,
    pub coerced: bool,
}

fn div_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"(?is)<div\b([^>]*)>"#).unwrap())
}

fn attr_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"([a-zA-Z_:-]+)\s*=\s*"([^"]*)""#).unwrap())
}

struct DivBox {
    category: Category,
    x: i64,
    y: i64,
    w: i64,
    h: i64,
    coerced: bool,
}

/// Round a style value half-up to integer px, flagging fractional input.
fn style_value(raw: &str, prop: &str) -> Result<(i64, bool), CodecError> {
    let cleaned = raw.trim().trim_end_matches("px").trim();
    let v: f64 = cleaned
        .parse()
        .map_err(|_| CodecError::MalformedStyle(format!("cannot parse {prop}:{raw:?}")))?;
    if !v.is_finite() {
        return Err(CodecError::MalformedStyle(format!("non-finite {prop}:{raw:?}")));
    }
    let rounded = (v + 0.5).floor();
    if rounded.abs() > i32::MAX as f64 {
        return Err(CodecError::MalformedStyle(format!("{prop}:{raw:?} out of range")));
    }
    Ok((rounded as i64, v.fract() != 0.0))
}

fn parse_div(attrs: &str) -> Result<DivBox, CodecError> {
    let mut class: Option<String> = None;
    let mut style: Option<String> = None;
    for cap in attr_regex().captures_iter(attrs) {
        match cap[1].to_ascii_lowercase().as_str() {
            "class" => class = Some(cap[2].to_string()),
            "style" => style = Some(cap[2].to_string()),
            _ => {}
        }
    }
    let class = class.unwrap_or_default();
    let category = class
        .parse::<Category>()
        .map_err(|_| CodecError::UnknownCategory(class.clone()))?;
    let style = style.ok_or_else(|| CodecError::MalformedStyle("missing style attribute".into()))?;

    let (mut x, mut y, mut w, mut h) = (None, None, None, None);
    let mut coerced = false;
    for prop in style.split(';') {
        let prop = prop.trim();
        if prop.is_empty() {
            continue;
        }
        let Some((name, value)) = prop.split_once(':') else {
            continue;
        };
        let slot = match name.trim().to_ascii_lowercase().as_str() {
            "left" => &mut x,
            "top" => &mut y,
            "width" => &mut w,
            "height" => &mut h,
            _ => continue,
        };
        let (v, c) = style_value(value, name.trim())?;
        coerced |= c;
        *slot = Some(v);
    }
    let x = x.ok_or_else(|| CodecError::MalformedStyle("missing left".into()))?;
    let y = y.ok_or_else(|| CodecError::MalformedStyle("missing top".into()))?;
    let w = w.ok_or_else(|| CodecError::MalformedStyle("missing width".into()))?;
    let h = h.ok_or_else(|| CodecError::MalformedStyle("missing height".into()))?;
    if w < 0 || h < 0 {
        return Err(CodecError::NegativeDimension(format!(
            "{category} div (width:{w}px, height:{h}px)"
        )));
    }
    Ok(DivBox { category, x, y, w, h, coerced })
}

/// Parse the constrained HTML subset into a [`Layout`].
///
/// Tolerates `<html><body>` scaffolding, arbitrary whitespace, attribute
/// spacing, and any ordering of the four style properties. The canvas is
/// taken from the `class="canvas"` div when present, else from
/// `expected_canvas`. Element indices are assigned in document order
/// (0..N-1 over non-canvas divs), reproducing the "text 0 | text 1 |
/// underlay 2" naming when divs follow constraint order.
pub fn parse_layout_html(
    text: &str,
    expected_canvas: Option<Rect>,
) -> Result<ParsedLayout, CodecError> {
    let mut canvas: Option<Rect> = None;
    let mut coerced = false;
    let mut boxes: Vec<DivBox> = Vec::new();
    for cap in div_regex().captures_iter(text) {
        let parsed = parse_div(&cap[1])?;
        coerced |= parsed.coerced;
        if parsed.category == Category::Canvas {
            if canvas.is_some() {
                return Err(CodecError::DuplicateCanvas);
            }
            if parsed.x != 0 || parsed.y != 0 || parsed.w <= 0 || parsed.h <= 0 {
                return Err(CodecError::InvalidCanvas);
            }
            canvas = Some(Rect::new(0, 0, parsed.w, parsed.h).expect("validated"));
            continue;
        }
        boxes.push(parsed);
    }
    let canvas = canvas.or(expected_canvas).ok_or(CodecError::NoCanvas)?;

    let mut elements = Vec::with_capacity(boxes.len());
    for (index, b) in boxes.iter().enumerate() {
        let rect = Rect::new(b.x, b.y, b.w, b.h)
            .map_err(|_| CodecError::NegativeDimension(format!("{} div", b.category)))?;
        elements.push(Element::new(b.category, index as u32, rect)?);
    }
    Ok(ParsedLayout { layout: Layout::new(canvas, elements)?, coerced })
}

/// Canonical byte-deterministic serialization: scaffold, canvas div first,
/// then elements in order, style properties always left, top, width, height.
pub fn serialize_layout_html(layout: &Layout) -> String {
    let mut out = String::from("<html>\n<body>\n");
    let c = layout.canvas();
    out.push_str(&div_line(Category::Canvas, c));
    for e in layout.elements() {
        out.push_str(&div_line(e.category(), e.rect()));
    }
    out.push_str("</body>\n</html>");
    out
}

fn div_line(category: Category, r: &Rect) -> String {
    format!(
        "<div class=\"{}\" style=\"left:{}px; top:{}px; width:{}px; height:{}px\"></div>\n",
        category,
        r.x(),
        r.y(),
        r.w(),
        r.h()
    )
}

fn find_ci(haystack: &str, needle: &str, from: usize) -> Option<usize> {
    let hay = haystack.as_bytes();
    let nee = needle.as_bytes();
    if from > hay.len() || nee.is_empty() {
        return None;
    }
    hay[from..]
        .windows(nee.len())
        .position(|w| w.eq_ignore_ascii_case(nee))
        .map(|p| p + from)
}

/// Pull the layout document out of surrounding model prose: the span from
/// the first `<html>` through the first subsequent `</html>`, or failing
/// that the maximal run of consecutive `<div ...></div>` lines.
pub fn extract_html_block(model_output: &str) -> Result<String, CodecError> {
    if let Some(start) = find_ci(model_output, "<html>", 0) {
        if let Some(end) = find_ci(model_output, "</html>", start + "<html>".len()) {
            return Ok(model_output[start..end + "</html>".len()].to_string());
        }
    }

    let lines: Vec<&str> = model_output.lines().collect();
    let is_div_line = |line: &str| {
        let t = line.trim();
        t.len() >= 4
            && t.as_bytes()[..4.min(t.len())].eq_ignore_ascii_case(b"<div")
            && t.as_bytes()[t.len().saturating_sub(6)..].eq_ignore_ascii_case(b"</div>")
    };
    let mut best: Option<(usize, usize)> = None; // (start, len)
    let mut run_start = None;
    for (i, line) in lines.iter().enumerate() {
        if is_div_line(line) {
            run_start.get_or_insert(i);
            let start = run_start.unwrap();
            let len = i - start + 1;
            if best.map_or(true, |(_, blen)| len > blen) {
                best = Some((start, len));
            }
        } else {
            run_start = None;
        }
    }
    match best {
        Some((start, len)) => Ok(lines[start..start + len].join("\n")),
        None => Err(CodecError::NoLayoutFound),
    }
}

/// Deterministic salvage for outputs that failed strict parsing: drops
/// unknown-class and unparsable divs, clamps negative dimensions to zero,
/// and falls back to `expected_canvas` when the canvas div is unusable.
/// Returns `None` when no usable element survives.
pub fn salvage_layout_html(text: &str, expected_canvas: Option<Rect>) -> Option<ParsedLayout> {
    let body = extract_html_block(text).unwrap_or_else(|_| text.to_string());
    let mut canvas: Option<Rect> = None;
    let mut rects: Vec<(Category, Rect)> = Vec::new();
    let mut coerced = false;
    for cap in div_regex().captures_iter(&body) {
        let Ok(parsed) = parse_div(&cap[1]).or_else(|e| match e {
            // Negative w/h: reparse leniently by clamping below.
            CodecError::NegativeDimension(_) => lenient_parse_div(&cap[1]),
            other => Err(other),
        }) else {
            continue;
        };
        coerced |= parsed.coerced;
        let w = parsed.w.max(0);
        let h = parsed.h.max(0);
        if parsed.category == Category::Canvas {
            if canvas.is_none() && parsed.x == 0 && parsed.y == 0 && w > 0 && h > 0 {
                canvas = Some(Rect::new(0, 0, w, h).expect("validated"));
            }
            continue;
        }
        rects.push((parsed.category, Rect::new(parsed.x, parsed.y, w, h).expect("clamped")));
    }
    let canvas = canvas.or(expected_canvas)?;
    if rects.is_empty() {
        return None;
    }
    let elements = rects
        .into_iter()
        .enumerate()
        .map(|(i, (c, r))| Element::new(c, i as u32, r).expect("placeable"))
        .collect();
    let layout = Layout::new(canvas, elements).ok()?;
    Some(ParsedLayout { layout, coerced })
}

fn lenient_parse_div(attrs: &str) -> Result<DivBox, CodecError> {
    // Same as parse_div but without the negative-dimension check; the
    // caller clamps. Reuse by stripping the error case is not worth a
    // second grammar, so re-run and patch.
    let mut class: Option<String> = None;
    let mut style: Option<String> = None;
    for cap in attr_regex().captures_iter(attrs) {
        match cap[1].to_ascii_lowercase().as_str() {
            "class" => class = Some(cap[2].to_string()),
            "style" => style = Some(cap[2].to_string()),
            _ => {}
        }
    }
    let class = class.unwrap_or_default();
    let category = class
        .parse::<Category>()
        .map_err(|_| CodecError::UnknownCategory(class.clone()))?;
    let style = style.ok_or_else(|| CodecError::MalformedStyle("missing style".into()))?;
    let (mut x, mut y, mut w, mut h) = (None, None, None, None);
    let mut coerced = false;
    for prop in style.split(';') {
        let Some((name, value)) = prop.trim().split_once(':') else { continue };
        let slot = match name.trim().to_ascii_lowercase().as_str() {
            "left" => &mut x,
            "top" => &mut y,
            "width" => &mut w,
            "height" => &mut h,
            _ => continue,
        };
        let (v, c) = style_value(value, name.trim())?;
        coerced |= c;
        *slot = Some(v);
    }
    match (x, y, w, h) {
        (Some(x), Some(y), Some(w), Some(h)) => Ok(DivBox { category, x, y, w, h, coerced }),
        _ => Err(CodecError::MalformedStyle("missing properties".into())),
    }
}
