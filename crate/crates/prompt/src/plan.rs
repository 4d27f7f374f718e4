use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use adlayout_core::layout::{Category, ElementConstraint};

use super::PlanError;

/// One per-element placement directive, e.g. "Text 0 : Bottom center ...".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Directive {
    pub category: Category,
    pub index: u32,
    pub body: String,
}

/// A parsed placement plan. `raw` preserves the plan text byte-for-byte
/// (minus a leading "Placement Plan:" label) so prompts re-render the
/// model's own wording exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementPlan {
    raw: String,
    preamble: Option<String>,
    directives: Vec<Directive>,
}

impl PlacementPlan {
    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn preamble(&self) -> Option<&str> {
        self.preamble.as_deref()
    }

    pub fn directives(&self) -> &[Directive] {
        &self.directives
    }

    /// Author a plan from directives, rendering the canonical
    /// "- Text 0 : body" line form.
    pub fn from_directives(directives: Vec<Directive>) -> Self {
        let raw = directives
            .iter()
            .map(|d| format!("- {} {} : {}", capitalize(d.category), d.index, d.body))
            .collect::<Vec<_>>()
            .join("\n");
        Self { raw, preamble: None, directives }
    }
}

fn capitalize(c: Category) -> String {
    let s = c.as_str();
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    if let Some(first) = chars.next() {
        out.extend(first.to_uppercase());
    }
    out.push_str(chars.as_str());
    out
}

fn directive_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // "- Text 0 : ...", "- underlay 4: ...", "- Text 1, 2, 3: ..." etc.
    RE.get_or_init(|| {
        Regex::new(r"(?i)^\s*-\s*(logo|text|underlay)\s*((?:\d+\s*,\s*)*\d+)\s*:\s*(.*)$").unwrap()
    })
}

fn label_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^\s*placement\s+plan\s*:\s*$").unwrap())
}

/// Extract directive lines of the form `- <Category> <index> : <text>`
/// (case-insensitive, spacing-tolerant, comma-separated index lists
/// allowed). Prose before the first directive becomes the preamble. Every
/// constraint element must be covered by exactly one directive.
pub fn parse_plan(
    model_output: &str,
    constraint: &ElementConstraint,
) -> Result<PlacementPlan, PlanError> {
    let mut text = model_output.trim();
    // Drop a leading "Placement Plan:" label line if the model echoed one.
    if let Some(first_line_end) = text.find('\n') {
        if label_regex().is_match(&text[..first_line_end]) {
            text = text[first_line_end + 1..].trim_start_matches(['\r', '\n']);
        }
    } else if label_regex().is_match(text) {
        text = "";
    }
    let text = text.trim_end();

    let mut directives: Vec<Directive> = Vec::new();
    let mut preamble_lines: Vec<&str> = Vec::new();
    let mut seen_directive = false;
    for line in text.lines() {
        if let Some(caps) = directive_regex().captures(line) {
            seen_directive = true;
            let category: Category = caps[1].parse().expect("regex restricts alternatives");
            let body = caps[3].trim().to_string();
            for index_str in caps[2].split(',') {
                let index: u32 = index_str
                    .trim()
                    .parse()
                    .map_err(|_| PlanError::Constraint(format!("bad index in {line:?}")))?;
                if !constraint.contains(category, index) {
                    return Err(PlanError::UnknownElementRef { category, index });
                }
                directives.push(Directive { category, index, body: body.clone() });
            }
        } else if !seen_directive && !line.trim().is_empty() {
            preamble_lines.push(line.trim_end());
        }
    }

    let mut seen: BTreeSet<(Category, u32)> = BTreeSet::new();
    let mut duplicates: Vec<String> = Vec::new();
    for d in &directives {
        if !seen.insert((d.category, d.index)) {
            duplicates.push(format!("{} {}", d.category, d.index));
        }
    }
    if !duplicates.is_empty() {
        return Err(PlanError::DuplicateDirective(duplicates.join(", ")));
    }
    let missing: Vec<String> = constraint
        .items()
        .iter()
        .filter(|&&(c, i)| !seen.contains(&(c, i)))
        .map(|&(c, i)| format!("{c} {i}"))
        .collect();
    if !missing.is_empty() {
        return Err(PlanError::MissingDirective(missing.join(", ")));
    }

    let preamble =
        (!preamble_lines.is_empty()).then(|| preamble_lines.join("\n").trim().to_string());
    Ok(PlacementPlan { raw: text.to_string(), preamble, directives })
}
