use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::LlmError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKindConfig {
    HttpChat,
    Scripted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 4, base_backoff_ms: 500 }
    }
}

impl RetryPolicy {
    /// Delay before retry `k` (1-based): `base * 2^(k-1)`, saturating.
    pub fn backoff_ms(&self, k: u32) -> u64 {
        let shift = k.saturating_sub(1).min(32);
        self.base_backoff_ms.saturating_mul(1u64 << shift)
    }

    /// Delays between consecutive attempts.
    pub fn schedule(&self) -> Vec<u64> {
        (1..self.max_attempts).map(|k| self.backoff_ms(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub kind: BackendKindConfig,
    #[serde(default)]
    pub endpoint_url: Option<String>,
    #[serde(default)]
    pub model_id: String,
    #[serde(default)]
    pub credential_env_var: Option<String>,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default)]
    pub script_path: Option<PathBuf>,
    /// Appends every exchange to this script file.
    #[serde(default)]
    pub record_path: Option<PathBuf>,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_output_tokens")]
    pub max_output_tokens: u32,
    #[serde(default)]
    pub requests_per_minute: Option<u32>,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
}

fn default_max_output_tokens() -> u32 {
    4096
}

fn default_timeout_ms() -> u64 {
    120_000
}

pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
pub const DEFAULT_CREDENTIAL_VAR: &str = "OPENAI_API_KEY";

impl BackendConfig {
    pub fn http(model_id: impl Into<String>) -> Self {
        BackendConfig {
            kind: BackendKindConfig::HttpChat,
            endpoint_url: Some(DEFAULT_ENDPOINT.into()),
            model_id: model_id.into(),
            credential_env_var: Some(DEFAULT_CREDENTIAL_VAR.into()),
            retry: RetryPolicy::default(),
            script_path: None,
            record_path: None,
            temperature: 0.0,
            max_output_tokens: default_max_output_tokens(),
            requests_per_minute: None,
            timeout_ms: default_timeout_ms(),
        }
    }

    pub fn scripted(path: impl Into<PathBuf>) -> Self {
        BackendConfig {
            kind: BackendKindConfig::Scripted,
            endpoint_url: None,
            model_id: "scripted".into(),
            credential_env_var: None,
            script_path: Some(path.into()),
            ..BackendConfig::http("")
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        let bad = |m: &str| Err(LlmError::Config(m.to_string()));
        match self.kind {
            BackendKindConfig::HttpChat if self.endpoint_url.as_deref().is_none_or(str::is_empty) => {
                bad("http_chat backend needs endpoint_url")
            }
            BackendKindConfig::HttpChat if self.credential_env_var.as_deref().is_none_or(str::is_empty) => {
                bad("http_chat backend needs credential_env_var")
            }
            BackendKindConfig::HttpChat if self.model_id.is_empty() => bad("http_chat backend needs model_id"),
            BackendKindConfig::Scripted if self.script_path.is_none() => bad("scripted backend needs script_path"),
            _ if self.retry.max_attempts == 0 => bad("retry.max_attempts must be at least 1"),
            _ if self.temperature.is_nan() || self.temperature < 0.0 => bad("temperature must be non-negative"),
            _ if self.max_output_tokens == 0 => bad("max_output_tokens must be positive"),
            _ if self.requests_per_minute == Some(0) => bad("requests_per_minute must be positive"),
            _ => Ok(()),
        }
    }

    fn resolve_paths(&mut self, base: &Path) {
        for p in [&mut self.script_path, &mut self.record_path].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

/// The `[generation]` and `[verification]` sections of a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmConfig {
    pub generation: BackendConfig,
    pub verification: BackendConfig,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig { generation: BackendConfig::http("gpt-4"), verification: BackendConfig::http("o1-mini") }
    }
}

impl LlmConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, LlmError> {
        let cfg: LlmConfig = toml::from_str(text).map_err(|e| LlmError::Config(e.to_string()))?;
        cfg.generation.validate()?;
        cfg.verification.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. Relative script paths are taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, LlmError> {
        let text = std::fs::read_to_string(path).map_err(|source| LlmError::Io { path: path.to_path_buf(), source })?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.generation.resolve_paths(base);
        cfg.verification.resolve_paths(base);
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_is_exponential_and_monotone() {
        let p = RetryPolicy { max_attempts: 5, base_backoff_ms: 100 };
        assert_eq!(p.schedule(), vec![100, 200, 400, 800]);
        let big = RetryPolicy { max_attempts: 80, base_backoff_ms: u64::MAX / 2 };
        assert!(big.schedule().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn parses_both_sections() {
        let text = r#"
[generation]
kind = "http_chat"
endpoint_url = "http://localhost:9/v1/chat/completions"
model_id = "gpt-4"
credential_env_var = "GEN_KEY"
retry = { max_attempts = 2, base_backoff_ms = 10 }

[verification]
kind = "scripted"
script_path = "ver.script"
"#;
        let cfg = LlmConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.generation.retry.max_attempts, 2);
        assert_eq!(cfg.generation.temperature, 0.0);
        assert_eq!(cfg.verification.kind, BackendKindConfig::Scripted);
    }

    #[test]
    fn invalid_sections_are_rejected() {
        let missing_script =
            "[generation]\nkind = \"scripted\"\n[verification]\nkind = \"scripted\"\nscript_path = \"x\"\n";
        assert!(matches!(LlmConfig::from_toml_str(missing_script), Err(LlmError::Config(_))));
        let missing_section = "[generation]\nkind = \"scripted\"\nscript_path = \"x\"\n";
        assert!(LlmConfig::from_toml_str(missing_section).is_err());
        let mut http = BackendConfig::http("m");
        http.credential_env_var = None;
        assert!(http.validate().is_err());
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("normloop.toml");
        let cfg = LlmConfig {
            generation: BackendConfig::scripted("gen.script"),
            verification: BackendConfig::scripted("/abs/ver.script"),
        };
        std::fs::write(&path, cfg.to_toml_string()).unwrap();
        let loaded = LlmConfig::load(&path).unwrap();
        assert_eq!(loaded.generation.script_path.unwrap(), dir.path().join("gen.script"));
        assert_eq!(loaded.verification.script_path.unwrap(), PathBuf::from("/abs/ver.script"));
    }
}
