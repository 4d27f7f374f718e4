use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

/// One piece of a message: text, or a reference to an image file that the
/// transport layer encodes at send time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PromptPart {
    Text(String),
    Image(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptMessage {
    pub role: Role,
    pub parts: Vec<PromptPart>,
}

/// An ordered message list plus bookkeeping. The text rendering (image
/// parts become `<image>` lines) is what golden-snapshot tests compare.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub messages: Vec<PromptMessage>,
    pub condition: String,
    pub shots: usize,
}

impl PromptBundle {
    pub fn single_user(parts: Vec<PromptPart>, condition: impl Into<String>, shots: usize) -> Self {
        Self {
            messages: vec![PromptMessage { role: Role::User, parts }],
            condition: condition.into(),
            shots,
        }
    }

    /// Plain-text form with `<image>` placeholder lines.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            for part in &m.parts {
                match part {
                    PromptPart::Text(t) => out.push_str(t),
                    PromptPart::Image(_) => out.push_str("<image>\n"),
                }
            }
        }
        out
    }

    pub fn image_paths(&self) -> Vec<&PathBuf> {
        self.messages
            .iter()
            .flat_map(|m| &m.parts)
            .filter_map(|p| match p {
                PromptPart::Image(path) => Some(path),
                PromptPart::Text(_) => None,
            })
            .collect()
    }
}

/// Incrementally builds a single-user-message bundle, merging consecutive
/// text fragments into one part.
pub(crate) struct BundleBuilder {
    parts: Vec<PromptPart>,
    text: String,
}

impl BundleBuilder {
    pub fn new() -> Self {
        Self { parts: Vec::new(), text: String::new() }
    }

    pub fn text(&mut self, s: &str) -> &mut Self {
        self.text.push_str(s);
        self
    }

    pub fn image(&mut self, path: &std::path::Path) -> &mut Self {
        if !self.text.is_empty() {
            self.parts.push(PromptPart::Text(std::mem::take(&mut self.text)));
        }
        self.parts.push(PromptPart::Image(path.to_path_buf()));
        self
    }

    pub fn finish(mut self, condition: impl Into<String>, shots: usize) -> PromptBundle {
        if !self.text.is_empty() {
            self.parts.push(PromptPart::Text(std::mem::take(&mut self.text)));
        }
        PromptBundle::single_user(self.parts, condition, shots)
    }
}
