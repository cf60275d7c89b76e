//! Chat-completion client shared by the LLM generator and verifier.
//!
//! Two backends exist: an OpenAI-compatible HTTP client and a scripted
//! replay backend that reads recorded responses from a file, so that whole
//! sessions can run offline.

mod config;
mod http;
mod ratelimit;
mod script;

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{BackendConfig, BackendKindConfig, LlmConfig, RetryPolicy, DEFAULT_CREDENTIAL_VAR, DEFAULT_ENDPOINT};
pub use http::HttpBackend;
pub use ratelimit::RateLimiter;
pub use script::{record, Recorder, ScriptMode, ScriptedBackend};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChatRole {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: ChatRole,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Message { role: ChatRole::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Message { role: ChatRole::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Message { role: ChatRole::Assistant, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model_id: String,
    pub messages: Vec<Message>,
    pub temperature: f64,
    pub max_output_tokens: u32,
}

impl ChatRequest {
    pub fn new(model_id: impl Into<String>, messages: Vec<Message>) -> Self {
        ChatRequest { model_id: model_id.into(), messages, temperature: 0.0, max_output_tokens: 4096 }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        let bad = |m: &str| Err(LlmError::InvalidRequest(m.to_string()));
        match self.messages.last() {
            None => bad("request has no messages"),
            Some(m) if m.role != ChatRole::User => bad("last message must come from the user"),
            _ if self.temperature.is_nan() || self.temperature < 0.0 => bad("temperature must be non-negative"),
            _ if self.max_output_tokens == 0 => bad("max_output_tokens must be positive"),
            _ => Ok(()),
        }
    }

    /// SHA-256 over the model id and the messages. Sampling parameters are
    /// left out so a script stays valid when they are tuned.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.model_id.as_bytes());
        for m in &self.messages {
            h.update([0u8]);
            h.update(serde_json::to_string(&m.role).unwrap_or_default().as_bytes());
            h.update([0u8]);
            h.update(m.content.as_bytes());
        }
        hex(&h.finalize())
    }

    /// Text of the last user message.
    pub fn prompt(&self) -> &str {
        self.messages.last().map(|m| m.content.as_str()).unwrap_or("")
    }
}

/// Model id and sampling parameters attached to every request of a role.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatSettings {
    pub model_id: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
}

impl Default for ChatSettings {
    fn default() -> Self {
        ChatSettings { model_id: String::new(), temperature: 0.0, max_output_tokens: 4096 }
    }
}

impl ChatSettings {
    pub fn from_config(config: &BackendConfig) -> Self {
        ChatSettings {
            model_id: config.model_id.clone(),
            temperature: config.temperature,
            max_output_tokens: config.max_output_tokens,
        }
    }

    pub fn request(&self, messages: Vec<Message>) -> ChatRequest {
        ChatRequest {
            model_id: self.model_id.clone(),
            messages,
            temperature: self.temperature,
            max_output_tokens: self.max_output_tokens,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub content: String,
    pub usage: Option<Usage>,
    pub latency_ms: u64,
}

impl ChatResponse {
    pub fn text(content: impl Into<String>) -> Self {
        ChatResponse { content: content.into(), usage: None, latency_ms: 0 }
    }
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("credential environment variable `{var}` is not set")]
    CredentialMissing { var: String },
    #[error("transport failed after {attempts} attempt(s){}: {message}", status.map(|s| format!(" (HTTP {s})")).unwrap_or_default())]
    Transport { attempts: u32, status: Option<u16>, message: String },
    #[error("script {path:?} has no response left after {served} call(s)")]
    ScriptExhausted { path: PathBuf, served: usize },
    #[error("script {path:?} has no response recorded for request digest {digest}")]
    ScriptMismatch { path: PathBuf, digest: String },
    #[error("script {path:?} line {line}: {message}")]
    ScriptFormat { path: PathBuf, line: usize, message: String },
    #[error("invalid backend configuration: {0}")]
    Config(String),
    #[error("invalid chat request: {0}")]
    InvalidRequest(String),
    #[error("I/O error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub trait ChatBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError>;

    /// Backends whose answers depend on call order. Callers keep such
    /// sessions sequential.
    fn is_order_sensitive(&self) -> bool {
        false
    }
}

impl<T: ChatBackend + ?Sized> ChatBackend for Arc<T> {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        (**self).complete(request)
    }

    fn is_order_sensitive(&self) -> bool {
        (**self).is_order_sensitive()
    }
}

/// Builds the backend described by `config`, wrapped in a recorder when
/// `record_path` is set. HTTP backends read their credential here, before
/// any network I/O.
pub fn connect(config: &BackendConfig) -> Result<Arc<dyn ChatBackend>, LlmError> {
    config.validate()?;
    let inner: Arc<dyn ChatBackend> = match config.kind {
        BackendKindConfig::HttpChat => Arc::new(HttpBackend::from_config(config)?),
        BackendKindConfig::Scripted => {
            let path = config.script_path.as_ref().expect("validated");
            Arc::new(ScriptedBackend::load(path)?)
        }
    };
    Ok(match &config.record_path {
        Some(path) => Arc::new(Recorder::new(inner, path.clone())),
        None => inner,
    })
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Hex SHA-256 of `text`.
pub fn sha256_hex(text: &str) -> String {
    hex(&Sha256::digest(text.as_bytes()))
}
