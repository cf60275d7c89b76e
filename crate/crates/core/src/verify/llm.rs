use std::sync::Arc;

use crate::llm::{sha256_hex, ChatBackend, ChatSettings, Message};
use crate::prompt::{build_prompt, estimate_tokens, retry_message, PromptRole, PromptTemplate, ShotMode};
use crate::schema::{NormalForm, Schema};

use super::{parse_verdict_block, BackendKind, Exchange, VerificationReport, Verifier, VerifyError};

/// Replies that cannot be read are answered with the parse error and asked
/// for again this many times.
pub const MAX_PARSE_RETRIES: u32 = 2;

pub struct LlmVerifier {
    backend: Arc<dyn ChatBackend>,
    settings: ChatSettings,
    template: PromptTemplate,
}

impl LlmVerifier {
    pub fn new(backend: Arc<dyn ChatBackend>, settings: ChatSettings) -> Self {
        LlmVerifier { backend, settings, template: PromptTemplate::builtin(PromptRole::Verification, ShotMode::Zero) }
    }

    pub fn with_template(mut self, template: PromptTemplate) -> Self {
        self.template = template;
        self
    }

    pub fn backend(&self) -> &Arc<dyn ChatBackend> {
        &self.backend
    }
}

impl Verifier for LlmVerifier {
    fn kind(&self) -> BackendKind {
        BackendKind::Llm
    }

    fn verify(&self, schema: &Schema, target: NormalForm) -> Result<VerificationReport, VerifyError> {
        let errors = schema.validate();
        if !errors.is_empty() {
            return Err(VerifyError::Structural(errors));
        }
        let prompt = build_prompt(&self.template, schema, None, target)?;
        let mut messages = vec![Message::user(prompt.clone())];
        let mut tokens = 0;
        let mut retries = 0;
        loop {
            tokens += messages.iter().map(|m| estimate_tokens(&m.content)).sum::<usize>();
            let reply = self.backend.complete(&self.settings.request(messages.clone()))?;
            match parse_verdict_block(&reply.content, target) {
                Ok(block) => {
                    let mut report = block.into_report(target, BackendKind::Llm);
                    report.exchange = Some(Exchange {
                        prompt,
                        reply_digest: sha256_hex(&reply.content),
                        prompt_tokens_est: tokens,
                        parse_retries_used: retries,
                    });
                    return Ok(report);
                }
                Err(message) if retries >= MAX_PARSE_RETRIES => {
                    return Err(VerifyError::ReplyUnparseable { attempts: retries + 1, message });
                }
                Err(message) => {
                    retries += 1;
                    messages.push(Message::assistant(reply.content));
                    messages.push(Message::user(retry_message(
                        &message,
                        "one `NFk: PASS` or `NFk: FAIL` line per normal form followed by the ANOMALY lines",
                    )));
                }
            }
        }
    }

    fn is_order_sensitive(&self) -> bool {
        self.backend.is_order_sensitive()
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Mutex;

    use super::*;
    use crate::ddl::parse_ddl;
    use crate::llm::{ChatRequest, ChatResponse, LlmError};
    use crate::verify::{AnomalyKind, Verdict};

    struct Canned(Mutex<Vec<&'static str>>);

    impl ChatBackend for Canned {
        fn complete(&self, _: &ChatRequest) -> Result<ChatResponse, LlmError> {
            let mut q = self.0.lock().unwrap();
            Ok(ChatResponse::text(if q.is_empty() { "" } else { q.remove(0) }))
        }
    }

    fn verifier(replies: Vec<&'static str>) -> LlmVerifier {
        LlmVerifier::new(Arc::new(Canned(Mutex::new(replies))), ChatSettings::default())
    }

    fn schema() -> Schema {
        parse_ddl("CREATE TABLE t (a INT, b INT, PRIMARY KEY (a));").unwrap()
    }

    #[test]
    fn parses_a_verdict_block() {
        let v = verifier(vec!["NF1: PASS\nNF2: PASS\nNF3: FAIL\nANOMALY: NF3 | TRANSITIVE | t | b | x | y"]);
        let r = v.verify(&schema(), NormalForm::Nf3).unwrap();
        assert_eq!(r.verdict(NormalForm::Nf3), Some(Verdict::Fail));
        assert_eq!(r.anomalies[0].kind, AnomalyKind::Transitive);
        let ex = r.exchange.unwrap();
        assert_eq!(ex.parse_retries_used, 0);
        assert_eq!(ex.prompt_tokens_est, estimate_tokens(&ex.prompt));
    }

    #[test]
    fn retries_then_succeeds() {
        let v = verifier(vec!["looks good to me", "NF1: PASS\nNF2: PASS\nNF3: PASS"]);
        let r = v.verify(&schema(), NormalForm::Nf3).unwrap();
        assert!(r.passes(NormalForm::Nf3));
        let ex = r.exchange.unwrap();
        assert_eq!(ex.parse_retries_used, 1);
        assert!(ex.prompt_tokens_est > 2 * estimate_tokens(&ex.prompt));
    }

    #[test]
    fn gives_up_after_two_retries() {
        let v = verifier(vec!["no", "still no", "nope", "NF1: PASS\nNF2: PASS\nNF3: PASS"]);
        let err = v.verify(&schema(), NormalForm::Nf3).unwrap_err();
        assert!(matches!(err, VerifyError::ReplyUnparseable { attempts: 3, .. }));
        assert!(err.is_backend_failure());
    }
}
