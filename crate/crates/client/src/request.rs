use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::encode::EncodedImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MessagePart {
    Text(String),
    Image(EncodedImage),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChatMessage {
    pub role: Role,
    pub parts: Vec<MessagePart>,
}

impl ChatMessage {
    pub fn user_text(text: impl Into<String>) -> Self {
        Self { role: Role::User, parts: vec![MessagePart::Text(text.into())] }
    }

    pub fn assistant_text(text: impl Into<String>) -> Self {
        Self { role: Role::Assistant, parts: vec![MessagePart::Text(text.into())] }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub total_tokens: u64,
}

pub const DEFAULT_TEMPERATURE: f64 = 0.7;
pub const DEFAULT_TOP_P: f64 = 1.0;
pub const DEFAULT_MAX_TOKENS: u32 = 2048;

/// One chat-completions request. Sampling defaults: temperature 0.7,
/// top_p 1, max_tokens 2048.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
}

impl ModelRequest {
    pub fn new(model: impl Into<String>, messages: Vec<ChatMessage>) -> Self {
        Self {
            model: model.into(),
            messages,
            temperature: DEFAULT_TEMPERATURE,
            top_p: DEFAULT_TOP_P,
            max_tokens: DEFAULT_MAX_TOKENS,
        }
    }

    /// Stable request identity for cassette lookup: sha-256 over the model
    /// id, the sampling parameters, and each message's role and parts,
    /// where image parts contribute their content digest (never the file
    /// path). The exact byte layout is documented in docs/cassette.md.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(b"model\0");
        hasher.update(self.model.as_bytes());
        hasher.update(format!("\0temperature\0{}\0top_p\0{}\0max_tokens\0{}", self.temperature, self.top_p, self.max_tokens));
        for message in &self.messages {
            hasher.update(b"\0message\0");
            hasher.update(message.role.as_str().as_bytes());
            for part in &message.parts {
                match part {
                    MessagePart::Text(t) => {
                        hasher.update(b"\0t\0");
                        hasher.update(t.as_bytes());
                    }
                    MessagePart::Image(img) => {
                        hasher.update(b"\0i\0");
                        hasher.update(img.digest.as_bytes());
                    }
                }
            }
        }
        hex::encode(hasher.finalize())
    }

    /// OpenAI-compatible wire body.
    pub fn to_wire_json(&self) -> serde_json::Value {
        let messages: Vec<serde_json::Value> = self
            .messages
            .iter()
            .map(|m| {
                let content: Vec<serde_json::Value> = m
                    .parts
                    .iter()
                    .map(|p| match p {
                        MessagePart::Text(t) => serde_json::json!({
                            "type": "text",
                            "text": t,
                        }),
                        MessagePart::Image(img) => serde_json::json!({
                            "type": "image_url",
                            "image_url": {
                                "url": format!("data:{};base64,{}", img.media_type, img.base64),
                            },
                        }),
                    })
                    .collect();
                serde_json::json!({ "role": m.role.as_str(), "content": content })
            })
            .collect();
        serde_json::json!({
            "model": self.model,
            "messages": messages,
            "temperature": self.temperature,
            "top_p": self.top_p,
            "max_tokens": self.max_tokens,
        })
    }
}
