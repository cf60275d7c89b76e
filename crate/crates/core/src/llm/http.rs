use std::fmt;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::config::{BackendConfig, RetryPolicy};
use super::{ChatBackend, ChatRequest, ChatResponse, LlmError, RateLimiter, Usage};

/// OpenAI-compatible chat-completions client. `endpoint_url` is the full
/// completions URL.
pub struct HttpBackend {
    client: reqwest::blocking::Client,
    endpoint: String,
    model_id: String,
    api_key: String,
    retry: RetryPolicy,
    limiter: Option<RateLimiter>,
}

impl fmt::Debug for HttpBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HttpBackend")
            .field("endpoint", &self.endpoint)
            .field("model_id", &self.model_id)
            .field("api_key", &"<redacted>")
            .field("retry", &self.retry)
            .finish()
    }
}

enum Failure {
    Transient(Option<u16>, String),
    Fatal(Option<u16>, String),
}

impl HttpBackend {
    pub fn from_config(config: &BackendConfig) -> Result<Self, LlmError> {
        config.validate()?;
        let var = config.credential_env_var.clone().unwrap_or_default();
        let api_key = match std::env::var(&var) {
            Ok(v) if !v.trim().is_empty() => v,
            _ => return Err(LlmError::CredentialMissing { var }),
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_millis(config.timeout_ms))
            .build()
            .map_err(|e| LlmError::Config(format!("cannot build HTTP client: {e}")))?;
        Ok(HttpBackend {
            client,
            endpoint: config.endpoint_url.clone().unwrap_or_default(),
            model_id: config.model_id.clone(),
            api_key,
            retry: config.retry,
            limiter: config.requests_per_minute.map(|rpm| RateLimiter::new(rpm, 1)),
        })
    }

    fn body(&self, request: &ChatRequest) -> Value {
        let model = if request.model_id.is_empty() { &self.model_id } else { &request.model_id };
        json!({
            "model": model,
            "messages": request.messages,
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        })
    }

    fn scrub(&self, text: String) -> String {
        if self.api_key.is_empty() {
            text
        } else {
            text.replace(&self.api_key, "<redacted>")
        }
    }

    fn attempt(&self, body: &Value) -> Result<ChatResponse, Failure> {
        let start = Instant::now();
        let resp = self.client.post(&self.endpoint).bearer_auth(&self.api_key).json(body).send().map_err(|e| {
            let msg = describe(&e);
            if e.is_timeout() || e.is_connect() || e.is_request() {
                Failure::Transient(None, msg)
            } else {
                Failure::Fatal(None, msg)
            }
        })?;
        let status = resp.status();
        let text = resp.text().map_err(|e| Failure::Transient(Some(status.as_u16()), describe(&e)))?;
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(Failure::Transient(Some(status.as_u16()), snippet(&self.scrub(text))));
        }
        if !status.is_success() {
            return Err(Failure::Fatal(Some(status.as_u16()), snippet(&self.scrub(text))));
        }
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Fatal(Some(status.as_u16()), format!("response is not JSON: {e}")))?;
        let content = v["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| Failure::Fatal(Some(status.as_u16()), "response has no choices[0].message.content".into()))?
            .to_string();
        let usage = match (v["usage"]["prompt_tokens"].as_u64(), v["usage"]["completion_tokens"].as_u64()) {
            (Some(p), Some(c)) => Some(Usage { prompt_tokens: p, completion_tokens: c }),
            _ => None,
        };
        Ok(ChatResponse { content, usage, latency_ms: start.elapsed().as_millis() as u64 })
    }
}

// reqwest errors carry the URL but never request headers, so the bearer
// token cannot leak through them.
fn describe(e: &reqwest::Error) -> String {
    let mut s = e.to_string();
    let mut src = std::error::Error::source(e);
    while let Some(inner) = src {
        s.push_str(": ");
        s.push_str(&inner.to_string());
        src = inner.source();
    }
    s
}

fn snippet(body: &str) -> String {
    let trimmed = body.trim();
    match trimmed.char_indices().nth(200) {
        Some((i, _)) => format!("{}...", &trimmed[..i]),
        None => trimmed.to_string(),
    }
}

impl ChatBackend for HttpBackend {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        request.validate()?;
        let body = self.body(request);
        let mut attempt = 0;
        loop {
            attempt += 1;
            if let Some(l) = &self.limiter {
                l.acquire();
            }
            tracing::debug!(model = %self.model_id, digest = %request.digest(), attempt, "chat completion");
            match self.attempt(&body) {
                Ok(r) => return Ok(r),
                Err(Failure::Fatal(status, message)) => {
                    return Err(LlmError::Transport { attempts: attempt, status, message })
                }
                Err(Failure::Transient(status, message)) => {
                    if attempt >= self.retry.max_attempts {
                        return Err(LlmError::Transport { attempts: attempt, status, message });
                    }
                    let wait = self.retry.backoff_ms(attempt);
                    tracing::warn!(attempt, ?status, wait_ms = wait, "transient chat failure, retrying");
                    std::thread::sleep(Duration::from_millis(wait));
                }
            }
        }
    }
}
