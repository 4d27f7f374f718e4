//! Deterministic stand-in model used by offline tests and by the cassette
//! fixture generator: it answers plan requests with a well-formed plan and
//! layout requests with HTML for a constraint-satisfying layout, derived
//! purely from the request content.

use std::sync::Mutex;

use adlayout_client::{
    Cassette, CassetteEntry, ChatTransport, ClientError, MessagePart, ModelRequest, ModelResponse,
};
use adlayout_core::layout::{
    serialize_layout_html, Category, Element, ElementConstraint, Layout, Rect,
};

/// Scripted transport: pops canned responses in order; repeats the final
/// one when `repeat_last` is set.
pub struct ScriptedClient {
    responses: Mutex<std::collections::VecDeque<String>>,
    repeat_last: Option<String>,
}

impl ScriptedClient {
    pub fn new(responses: Vec<&str>) -> Self {
        Self {
            responses: Mutex::new(responses.into_iter().map(String::from).collect()),
            repeat_last: None,
        }
    }

    pub fn repeating(responses: Vec<&str>, last: &str) -> Self {
        Self {
            responses: Mutex::new(responses.into_iter().map(String::from).collect()),
            repeat_last: Some(last.to_string()),
        }
    }
}

impl ChatTransport for ScriptedClient {
    fn chat(&self, request: &ModelRequest) -> Result<ModelResponse, ClientError> {
        let mut queue = self.responses.lock().expect("script queue");
        let text = match queue.pop_front() {
            Some(t) => t,
            None => match &self.repeat_last {
                Some(t) => t.clone(),
                None => {
                    return Err(ClientError::CassetteMiss { fingerprint: request.fingerprint() })
                }
            },
        };
        Ok(ModelResponse { text, usage: None, latency_ms: 0, raw: None })
    }
}

fn fnv64(s: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// The concatenated text parts of a request (image parts skipped).
pub fn request_text(request: &ModelRequest) -> String {
    let mut out = String::new();
    for m in &request.messages {
        for p in &m.parts {
            if let MessagePart::Text(t) = p {
                out.push_str(t);
            }
        }
    }
    out
}

/// The element constraint of the test sample: the last
/// "Element Type Constraint:" line of the prompt.
pub fn constraint_from_prompt(text: &str) -> Option<ElementConstraint> {
    text.lines()
        .rev()
        .find_map(|line| line.strip_prefix("Element Type Constraint: "))
        .and_then(|s| s.trim().parse().ok())
}

/// A deterministic constraint-satisfying layout: logos and texts stack as
/// bands from the bottom up, each underlay wraps one of those bands.
/// `variant` jitters positions so different samples get different boxes.
pub fn synth_layout(constraint: &ElementConstraint, canvas: &Rect, variant: u64) -> Layout {
    let jitter = (variant % 4) as i64;
    let band_h = 10i64;
    let non_underlays: Vec<(Category, u32)> = constraint
        .items()
        .iter()
        .copied()
        .filter(|(c, _)| *c != Category::Underlay)
        .collect();
    let mut bands: Vec<Rect> = Vec::new();
    for i in 0..non_underlays.len() {
        let y = canvas.h() - 8 - (band_h + 4) * (i as i64 + 1);
        let x = 6 + jitter;
        let w = canvas.w() - 12 - 2 * jitter;
        bands.push(Rect::new(x, y.max(2), w.max(4), band_h).expect("synth band"));
    }
    let mut elements = Vec::with_capacity(constraint.len());
    let mut band_cursor = 0usize;
    let mut underlay_cursor = 0usize;
    for &(category, index) in constraint.items() {
        let rect = if category == Category::Underlay {
            let rect = if non_underlays.is_empty() {
                Rect::new(4, 4, canvas.w() - 8, band_h + 4).expect("synth underlay")
            } else {
                let band = &bands[underlay_cursor % bands.len()];
                Rect::new(
                    (band.x() - 2).max(0),
                    (band.y() - 2).max(0),
                    (band.w() + 4).min(canvas.w()),
                    (band.h() + 4).min(canvas.h()),
                )
                .expect("synth underlay")
            };
            underlay_cursor += 1;
            rect
        } else {
            let rect = bands[band_cursor];
            band_cursor += 1;
            rect
        };
        elements.push(Element::new(category, index, rect).expect("placeable"));
    }
    Layout::new(*canvas, elements).expect("synth layout")
}

/// Plan text for a constraint, directive per element.
pub fn synth_plan(constraint: &ElementConstraint) -> String {
    let mut out = String::from("Placement Plan:\n");
    for &(category, index) in constraint.items() {
        let cat = category.as_str();
        let mut cap = String::new();
        let mut chars = cat.chars();
        if let Some(first) = chars.next() {
            cap.extend(first.to_uppercase());
        }
        cap.push_str(chars.as_str());
        out.push_str(&format!(
            "- {cap} {index} : Band near the bottom, clear of the salient region.\n"
        ));
    }
    out.trim_end().to_string()
}

/// Deterministic model stand-in. Plan requests (the step-1 instruction is
/// in the prompt) get a plan; everything else gets prose-wrapped HTML for
/// a constraint-satisfying layout. Optionally records every exchange into
/// a cassette so replay runs reproduce the exact conversation.
pub struct SynthClient {
    canvas: Rect,
    cassette: Option<Mutex<Cassette>>,
}

impl SynthClient {
    pub fn new(canvas: Rect) -> Self {
        Self { canvas, cassette: None }
    }

    pub fn recording(canvas: Rect, cassette: Cassette) -> Self {
        Self { canvas, cassette: Some(Mutex::new(cassette)) }
    }

    pub fn response_for(&self, request: &ModelRequest) -> String {
        let text = request_text(request);
        let constraint = constraint_from_prompt(&text).unwrap_or_else(|| {
            "text 0".parse().expect("fallback constraint")
        });
        let variant = fnv64(&text);
        if text.contains("Please tell me the requirements") {
            synth_plan(&constraint)
        } else {
            let layout = synth_layout(&constraint, &self.canvas, variant);
            let html = serialize_layout_html(&layout);
            format!("Here is a layout that keeps the listed elements clear of the product.\n{html}\n")
        }
    }
}

impl ChatTransport for SynthClient {
    fn chat(&self, request: &ModelRequest) -> Result<ModelResponse, ClientError> {
        let text = self.response_for(request);
        if let Some(cassette) = &self.cassette {
            cassette.lock().expect("cassette lock").record(CassetteEntry {
                fingerprint: request.fingerprint(),
                text: text.clone(),
                usage: None,
            })?;
        }
        Ok(ModelResponse { text, usage: None, latency_ms: 0, raw: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use adlayout_core::metrics::check_violations;

    #[test]
    fn synth_layout_satisfies_its_constraint() {
        let canvas = Rect::new(0, 0, 102, 150).unwrap();
        for s in [
            "text 0",
            "text 0 | text 1 | underlay 2",
            "logo 0 | text 1 | text 2 | text 3 | underlay 4",
            "logo 0 | logo 1 | text 2 | underlay 3",
            "text 0 | text 1 | underlay 2 | underlay 3",
        ] {
            let constraint: ElementConstraint = s.parse().unwrap();
            for variant in 0..4 {
                let layout = synth_layout(&constraint, &canvas, variant);
                let v = check_violations(&layout, &constraint);
                assert!(!v.has_violation, "{s} variant {variant}: {v:?}");
            }
        }
    }

    #[test]
    fn synth_plan_parses_against_its_constraint() {
        let constraint: ElementConstraint =
            "logo 0 | text 1 | text 2 | underlay 3".parse().unwrap();
        let plan = synth_plan(&constraint);
        let parsed = adlayout_prompt::parse_plan(&plan, &constraint).unwrap();
        assert_eq!(parsed.directives().len(), 4);
    }
}
