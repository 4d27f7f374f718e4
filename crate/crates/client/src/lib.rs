//! Transport to any chat-completions-style multimodal endpoint, plus a
//! deterministic record/replay cassette backend so the rest of the toolkit
//! never needs the network. No other crate in this workspace performs I/O
//! against a model API.

mod cassette;
mod encode;
mod http;
mod request;

pub use cassette::{Cassette, CassetteEntry};
pub use encode::{encode_image, EncodedImage};
pub use request::{ChatMessage, MessagePart, ModelRequest, Role, Usage};

use std::path::{Path, PathBuf};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("missing API configuration: {0} (set ADLAYOUT_API_BASE / ADLAYOUT_API_KEY)")]
    AuthMissing(&'static str),
    #[error("rate limited after {attempts} attempts")]
    RateLimited { attempts: u32 },
    #[error("malformed model response: {0}")]
    MalformedResponse(String),
    #[error("cassette has no entry for fingerprint {fingerprint}")]
    CassetteMiss { fingerprint: String },
    #[error("cannot read image {path}: {reason}")]
    UnreadableImage { path: String, reason: String },
    #[error("unsupported image format for {path} (need PNG or JPEG)")]
    UnsupportedFormat { path: String },
    #[error("API returned status {status}: {body}")]
    ApiStatus { status: u16, body: String },
    #[error("transport error: {0}")]
    Http(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A completed model call.
#[derive(Debug, Clone)]
pub struct ModelResponse {
    pub text: String,
    pub usage: Option<Usage>,
    pub latency_ms: u64,
    /// Full wire payload for audit; absent on replay.
    pub raw: Option<serde_json::Value>,
}

/// Anything that can answer a chat request: the real client, or scripted
/// mocks in tests.
pub trait ChatTransport: Send + Sync {
    fn chat(&self, request: &ModelRequest) -> Result<ModelResponse, ClientError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Live,
    Record,
    Replay,
}

impl BackendKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BackendKind::Live => "live",
            BackendKind::Record => "record",
            BackendKind::Replay => "replay",
        }
    }
}

impl std::str::FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "live" => Ok(BackendKind::Live),
            "record" => Ok(BackendKind::Record),
            "replay" => Ok(BackendKind::Replay),
            other => Err(format!("unknown backend {other:?} (expected live, record, or replay)")),
        }
    }
}

/// Retry schedule for transient live failures (timeouts, 429, 5xx):
/// up to `retries` re-attempts with exponentially growing sleeps.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self { retries: 3, base_delay: Duration::from_secs(1) }
    }
}

impl RetryPolicy {
    /// 1s, 2s, 4s for the default policy.
    pub fn delay(&self, attempt: u32) -> Duration {
        self.base_delay * 2u32.saturating_pow(attempt)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ClientConfig {
    pub api_base: Option<String>,
    pub api_key: Option<String>,
    pub concurrency: usize,
    pub retry: RetryPolicy,
}

impl ClientConfig {
    pub const ENV_API_BASE: &'static str = "ADLAYOUT_API_BASE";
    pub const ENV_API_KEY: &'static str = "ADLAYOUT_API_KEY";
    pub const ENV_MODEL: &'static str = "ADLAYOUT_MODEL";

    pub fn from_env() -> Self {
        Self {
            api_base: std::env::var(Self::ENV_API_BASE).ok(),
            api_key: std::env::var(Self::ENV_API_KEY).ok(),
            concurrency: 4,
            retry: RetryPolicy::default(),
        }
    }
}

enum Backend {
    Live,
    Record(Mutex<Cassette>),
    Replay(Cassette),
}

/// The model client. Shareable across threads; live calls are bounded by
/// a counting semaphore (default 4 in flight).
pub struct Client {
    config: ClientConfig,
    backend: Backend,
    permits: Semaphore,
}

impl Client {
    pub fn live(config: ClientConfig) -> Self {
        let permits = Semaphore::new(config.concurrency.max(1));
        Self { config, backend: Backend::Live, permits }
    }

    pub fn record(config: ClientConfig, cassette_path: &Path) -> Result<Self, ClientError> {
        let cassette = Cassette::open_or_create(cassette_path)?;
        let permits = Semaphore::new(config.concurrency.max(1));
        Ok(Self { config, backend: Backend::Record(Mutex::new(cassette)), permits })
    }

    pub fn replay(cassette_path: &Path) -> Result<Self, ClientError> {
        let cassette = Cassette::open(cassette_path)?;
        Ok(Self {
            config: ClientConfig::default(),
            backend: Backend::Replay(cassette),
            permits: Semaphore::new(1),
        })
    }

    pub fn backend_kind(&self) -> BackendKind {
        match self.backend {
            Backend::Live => BackendKind::Live,
            Backend::Record(_) => BackendKind::Record,
            Backend::Replay(_) => BackendKind::Replay,
        }
    }

    pub fn cassette_path(&self) -> Option<PathBuf> {
        match &self.backend {
            Backend::Record(c) => Some(c.lock().expect("cassette lock").path().to_path_buf()),
            Backend::Replay(c) => Some(c.path().to_path_buf()),
            Backend::Live => None,
        }
    }
}

impl ChatTransport for Client {
    fn chat(&self, request: &ModelRequest) -> Result<ModelResponse, ClientError> {
        match &self.backend {
            Backend::Replay(cassette) => {
                let fingerprint = request.fingerprint();
                let entry = cassette
                    .lookup(&fingerprint)
                    .ok_or(ClientError::CassetteMiss { fingerprint })?;
                Ok(ModelResponse {
                    text: entry.text.clone(),
                    usage: entry.usage.clone(),
                    latency_ms: 0,
                    raw: None,
                })
            }
            Backend::Live => {
                let _permit = self.permits.acquire();
                http::post_chat(&self.config, request)
            }
            Backend::Record(cassette) => {
                let response = {
                    let _permit = self.permits.acquire();
                    http::post_chat(&self.config, request)?
                };
                let entry = CassetteEntry {
                    fingerprint: request.fingerprint(),
                    text: response.text.clone(),
                    usage: response.usage.clone(),
                };
                cassette.lock().expect("cassette lock").record(entry)?;
                Ok(response)
            }
        }
    }
}

/// Minimal counting semaphore (std has none; this avoids an async runtime).
struct Semaphore {
    state: Mutex<usize>,
    cv: Condvar,
}

struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    fn new(count: usize) -> Self {
        Self { state: Mutex::new(count), cv: Condvar::new() }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut available = self.state.lock().expect("semaphore lock");
        while *available == 0 {
            available = self.cv.wait(available).expect("semaphore wait");
        }
        *available -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.state.lock().expect("semaphore lock") += 1;
        self.0.cv.notify_one();
    }
}
