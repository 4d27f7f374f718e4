use std::time::Instant;

use super::request::{ModelRequest, Usage};
use super::{ClientConfig, ClientError, ModelResponse};

/// Retry only transient failures: network-level errors, 429, and 5xx.
/// Other 4xx statuses are permanent.
pub(crate) fn retryable_status(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

enum AttemptOutcome {
    Done(ModelResponse),
    Retryable(ClientError),
    Fatal(ClientError),
}

pub(crate) fn post_chat(
    config: &ClientConfig,
    request: &ModelRequest,
) -> Result<ModelResponse, ClientError> {
    let base = config.api_base.as_deref().ok_or(ClientError::AuthMissing("endpoint URL"))?;
    let key = config.api_key.as_deref().ok_or(ClientError::AuthMissing("API key"))?;
    let url = format!("{}/chat/completions", base.trim_end_matches('/'));
    let body = request.to_wire_json();

    let http = reqwest::blocking::Client::builder()
        .timeout(std::time::Duration::from_secs(180))
        .build()
        .map_err(|e| ClientError::Http(e.to_string()))?;

    let mut last_error: Option<ClientError> = None;
    let mut rate_limited = false;
    let attempts = config.retry.retries + 1;
    for attempt in 0..attempts {
        if attempt > 0 {
            std::thread::sleep(config.retry.delay(attempt - 1));
        }
        match attempt_once(&http, &url, key, &body) {
            AttemptOutcome::Done(response) => return Ok(response),
            AttemptOutcome::Fatal(error) => return Err(error),
            AttemptOutcome::Retryable(error) => {
                log::warn!("attempt {} failed: {error}", attempt + 1);
                if matches!(error, ClientError::ApiStatus { status: 429, .. }) {
                    rate_limited = true;
                }
                last_error = Some(error);
            }
        }
    }
    if rate_limited {
        Err(ClientError::RateLimited { attempts })
    } else {
        Err(last_error.expect("at least one attempt ran"))
    }
}

fn attempt_once(
    http: &reqwest::blocking::Client,
    url: &str,
    key: &str,
    body: &serde_json::Value,
) -> AttemptOutcome {
    let started = Instant::now();
    let sent = http.post(url).bearer_auth(key).json(body).send();
    let response = match sent {
        Ok(r) => r,
        // Timeouts and connection failures are transient.
        Err(e) => return AttemptOutcome::Retryable(ClientError::Http(e.to_string())),
    };
    let status = response.status().as_u16();
    let text = match response.text() {
        Ok(t) => t,
        Err(e) => return AttemptOutcome::Retryable(ClientError::Http(e.to_string())),
    };
    if status != 200 {
        let error = ClientError::ApiStatus { status, body: truncate(&text, 400) };
        return if retryable_status(status) {
            AttemptOutcome::Retryable(error)
        } else {
            AttemptOutcome::Fatal(error)
        };
    }
    let latency_ms = started.elapsed().as_millis() as u64;
    match parse_chat_response(&text, latency_ms) {
        Ok(response) => AttemptOutcome::Done(response),
        Err(error) => AttemptOutcome::Fatal(error),
    }
}

fn truncate(s: &str, max: usize) -> String {
    if s.len() <= max {
        s.to_string()
    } else {
        format!("{}…", &s[..s.floor_char_boundary(max)])
    }
}

pub(crate) fn parse_chat_response(
    payload: &str,
    latency_ms: u64,
) -> Result<ModelResponse, ClientError> {
    let value: serde_json::Value = serde_json::from_str(payload)
        .map_err(|e| ClientError::MalformedResponse(format!("not JSON: {e}")))?;
    let text = value["choices"][0]["message"]["content"]
        .as_str()
        .ok_or_else(|| {
            ClientError::MalformedResponse("missing choices[0].message.content".to_string())
        })?
        .to_string();
    if text.is_empty() {
        return Err(ClientError::MalformedResponse("empty completion text".to_string()));
    }
    let usage = value.get("usage").and_then(|u| {
        Some(Usage {
            prompt_tokens: u.get("prompt_tokens")?.as_u64()?,
            completion_tokens: u.get("completion_tokens")?.as_u64()?,
            total_tokens: u.get("total_tokens")?.as_u64()?,
        })
    });
    Ok(ModelResponse { text, usage, latency_ms, raw: Some(value) })
}
