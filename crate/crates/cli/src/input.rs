use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use normloop::benchmark::dataset_sql;
use normloop::ddl::parse_ddl;
use normloop::llm::{connect, BackendConfig, ChatSettings, LlmConfig, LlmError};
use normloop::normalize::{DeterministicGenerator, Generator, LlmGenerator};
use normloop::verify::{DeterministicVerifier, LlmVerifier, Verifier};
use normloop::Schema;

use crate::{BackendChoice, ConfigArgs};

pub const DEFAULT_CONFIG: &str = "normloop.toml";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or unreadable input.
    Usage(String),
    /// The schema or run did not meet the requested outcome.
    Domain(String),
    /// Model backend or transport failure.
    Backend(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Backend(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Backend(m) => f.write_str(m),
        }
    }
}

impl From<LlmError> for CliError {
    fn from(e: LlmError) -> Self {
        match e {
            LlmError::Config(_) | LlmError::Io { .. } | LlmError::ScriptFormat { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Backend(e.to_string()),
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

/// DDL text of `arg`: a file path, or a bundled dataset name when no such
/// file exists.
pub fn schema_text(arg: &str) -> Result<String, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return read_file(path);
    }
    dataset_sql(arg)
        .map(str::to_string)
        .ok_or_else(|| CliError::Usage(format!("no such file or bundled dataset: {arg}")))
}

pub fn load_schema(arg: &str) -> Result<Schema, CliError> {
    let text = schema_text(arg)?;
    parse_ddl(&text).map_err(|e| CliError::Usage(format!("{arg}: {e}")))
}

pub fn load_config(args: &ConfigArgs) -> Result<LlmConfig, CliError> {
    match &args.config {
        Some(path) => Ok(LlmConfig::load(path)?),
        None => {
            let default = PathBuf::from(DEFAULT_CONFIG);
            if default.exists() {
                Ok(LlmConfig::load(&default)?)
            } else {
                Ok(LlmConfig::default())
            }
        }
    }
}

fn chat(config: &BackendConfig) -> Result<(Arc<dyn normloop::llm::ChatBackend>, ChatSettings), CliError> {
    Ok((connect(config)?, ChatSettings::from_config(config)))
}

pub fn generator(choice: BackendChoice, config: &LlmConfig) -> Result<Box<dyn Generator>, CliError> {
    Ok(match choice {
        BackendChoice::Det => Box::new(DeterministicGenerator),
        BackendChoice::Llm => {
            let (backend, settings) = chat(&config.generation)?;
            Box::new(LlmGenerator::new(backend, settings))
        }
    })
}

pub fn verifier(choice: BackendChoice, config: &LlmConfig) -> Result<Box<dyn Verifier>, CliError> {
    Ok(match choice {
        BackendChoice::Det => Box::new(DeterministicVerifier),
        BackendChoice::Llm => {
            let (backend, settings) = chat(&config.verification)?;
            Box::new(LlmVerifier::new(backend, settings))
        }
    })
}

/// The config is read only when some role uses a model.
pub fn config_for(choices: &[BackendChoice], args: &ConfigArgs) -> Result<LlmConfig, CliError> {
    if choices.contains(&BackendChoice::Llm) {
        load_config(args)
    } else {
        Ok(LlmConfig::default())
    }
}
