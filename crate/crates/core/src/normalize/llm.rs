use std::sync::Arc;

use crate::ddl::{extract_schema_block, parse_ddl};
use crate::llm::{sha256_hex, ChatBackend, ChatSettings, Message};
use crate::prompt::{build_prompt, estimate_tokens, retry_message, PromptRole, PromptTemplate};
use crate::schema::Schema;
use crate::verify::BackendKind;

use super::{GenerateError, GenerationOutcome, GenerationRequest, Generator};

pub const MAX_PARSE_RETRIES: u32 = 2;

pub struct LlmGenerator {
    backend: Arc<dyn ChatBackend>,
    settings: ChatSettings,
    template: Option<PromptTemplate>,
}

impl LlmGenerator {
    pub fn new(backend: Arc<dyn ChatBackend>, settings: ChatSettings) -> Self {
        LlmGenerator { backend, settings, template: None }
    }

    /// Uses `template` instead of the built-in one for the request's shot mode.
    pub fn with_template(mut self, template: PromptTemplate) -> Self {
        self.template = Some(template);
        self
    }

    fn read_reply(reply: &str) -> Result<Schema, String> {
        let block = extract_schema_block(reply).map_err(|e| e.to_string())?;
        parse_ddl(&block).map_err(|e| e.to_string())
    }
}

impl Generator for LlmGenerator {
    fn kind(&self) -> BackendKind {
        BackendKind::Llm
    }

    fn generate(&self, request: &GenerationRequest) -> Result<GenerationOutcome, GenerateError> {
        let template = match &self.template {
            Some(t) => t.clone(),
            None => PromptTemplate::builtin(PromptRole::Generation, request.shot_mode),
        };
        let prompt = build_prompt(&template, &request.schema, request.feedback.as_deref(), request.target)?;
        let mut messages = vec![Message::user(prompt.clone())];
        let mut tokens = 0;
        let mut retries = 0;
        loop {
            tokens += messages.iter().map(|m| estimate_tokens(&m.content)).sum::<usize>();
            let reply = self.backend.complete(&self.settings.request(messages.clone()))?;
            match Self::read_reply(&reply.content) {
                Ok(mut schema) => {
                    schema.name = request.schema.name.clone();
                    return Ok(GenerationOutcome {
                        schema,
                        prompt: Some(prompt),
                        reply_digest: Some(sha256_hex(&reply.content)),
                        raw_reply: Some(reply.content),
                        prompt_tokens_est: tokens,
                        parse_retries_used: retries,
                    });
                }
                Err(message) if retries >= MAX_PARSE_RETRIES => {
                    return Err(GenerateError::Failed {
                        attempts: retries + 1,
                        message,
                        prompt,
                        raw_reply: Some(reply.content),
                        prompt_tokens_est: tokens,
                    });
                }
                Err(message) => {
                    retries += 1;
                    messages.push(Message::assistant(reply.content));
                    messages.push(Message::user(retry_message(
                        &message,
                        "the complete normalized schema as CREATE TABLE statements in a single ```sql fenced block",
                    )));
                }
            }
        }
    }

    fn is_order_sensitive(&self) -> bool {
        self.backend.is_order_sensitive()
    }
}
