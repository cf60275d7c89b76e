//! Record and replay of chat sessions.
//!
//! A script is a text file with one exchange per line:
//!
//! ```text
//! # mode: keyed
//! <sha256 of the request, hex> <response content, base64>
//! ```
//!
//! Lines starting with `#` are comments; `# mode: keyed` makes replay look
//! responses up by request digest instead of serving them in file order.

use std::collections::{HashMap, VecDeque};
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;

use super::{ChatBackend, ChatRequest, ChatResponse, LlmError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptMode {
    Ordered,
    Keyed,
}

#[derive(Debug)]
struct ReplayState {
    next: usize,
    by_digest: HashMap<String, VecDeque<usize>>,
    used: Vec<bool>,
}

#[derive(Debug)]
pub struct ScriptedBackend {
    path: PathBuf,
    mode: ScriptMode,
    entries: Vec<(String, String)>,
    state: Mutex<ReplayState>,
}

impl ScriptedBackend {
    pub fn load(path: &Path) -> Result<Self, LlmError> {
        let text = std::fs::read_to_string(path).map_err(|source| LlmError::Io { path: path.to_path_buf(), source })?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self, LlmError> {
        let mut mode = ScriptMode::Ordered;
        let mut entries = Vec::new();
        let fmt_err = |line: usize, message: String| LlmError::ScriptFormat { path: path.to_path_buf(), line, message };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(m) = comment.trim().strip_prefix("mode:") {
                    mode = match m.trim() {
                        "keyed" => ScriptMode::Keyed,
                        "ordered" => ScriptMode::Ordered,
                        other => return Err(fmt_err(i + 1, format!("unknown mode `{other}`"))),
                    };
                }
                continue;
            }
            let (digest, payload) =
                line.split_once(' ').ok_or_else(|| fmt_err(i + 1, "expected `<digest> <base64>`".into()))?;
            if digest.len() != 64 || !digest.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(fmt_err(i + 1, "digest must be 64 hex digits".into()));
            }
            let bytes = STANDARD.decode(payload.trim()).map_err(|e| fmt_err(i + 1, format!("bad base64: {e}")))?;
            let content = String::from_utf8(bytes).map_err(|_| fmt_err(i + 1, "response is not UTF-8".into()))?;
            entries.push((digest.to_ascii_lowercase(), content));
        }
        let mut by_digest: HashMap<String, VecDeque<usize>> = HashMap::new();
        for (i, (d, _)) in entries.iter().enumerate() {
            by_digest.entry(d.clone()).or_default().push_back(i);
        }
        let state = ReplayState { next: 0, by_digest, used: vec![false; entries.len()] };
        Ok(ScriptedBackend { path: path.to_path_buf(), mode, entries, state: Mutex::new(state) })
    }

    pub fn mode(&self) -> ScriptMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl ChatBackend for ScriptedBackend {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        request.validate()?;
        let mut st = self.state.lock().unwrap_or_else(|e| e.into_inner());
        let served = st.used.iter().filter(|u| **u).count();
        let idx = match self.mode {
            ScriptMode::Ordered => {
                if st.next >= self.entries.len() {
                    return Err(LlmError::ScriptExhausted { path: self.path.clone(), served });
                }
                st.next += 1;
                st.next - 1
            }
            ScriptMode::Keyed => {
                let digest = request.digest();
                match st.by_digest.get_mut(&digest) {
                    None => return Err(LlmError::ScriptMismatch { path: self.path.clone(), digest }),
                    Some(q) => match q.pop_front() {
                        Some(i) => i,
                        None => return Err(LlmError::ScriptExhausted { path: self.path.clone(), served }),
                    },
                }
            }
        };
        st.used[idx] = true;
        Ok(ChatResponse::text(self.entries[idx].1.clone()))
    }

    fn is_order_sensitive(&self) -> bool {
        true
    }
}

fn script_line(request: &ChatRequest, response: &ChatResponse) -> String {
    format!("{} {}\n", request.digest(), STANDARD.encode(response.content.as_bytes()))
}

/// Appends one exchange to the script at `path`, creating it when absent.
pub fn record(request: &ChatRequest, response: &ChatResponse, path: &Path) -> Result<(), LlmError> {
    let io = |source| LlmError::Io { path: path.to_path_buf(), source };
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    f.write_all(script_line(request, response).as_bytes()).map_err(io)
}

/// Passes calls through to an inner backend and records every exchange.
/// The script is written in keyed mode.
pub struct Recorder {
    inner: Arc<dyn ChatBackend>,
    path: PathBuf,
    lock: Mutex<bool>,
}

impl Recorder {
    pub fn new(inner: Arc<dyn ChatBackend>, path: PathBuf) -> Self {
        Recorder { inner, path, lock: Mutex::new(false) }
    }
}

impl ChatBackend for Recorder {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        let response = self.inner.complete(request)?;
        let mut started = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        if !*started {
            let fresh = std::fs::metadata(&self.path).map(|m| m.len() == 0).unwrap_or(true);
            if fresh {
                std::fs::write(&self.path, "# mode: keyed\n")
                    .map_err(|source| LlmError::Io { path: self.path.clone(), source })?;
            }
            *started = true;
        }
        record(request, &response, &self.path)?;
        Ok(response)
    }

    fn is_order_sensitive(&self) -> bool {
        true
    }
}
