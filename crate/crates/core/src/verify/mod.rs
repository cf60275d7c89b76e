//! Per-normal-form verification with monotone verdicts.

mod checks;
mod feedback;
mod llm;
mod verdict;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fd::FdError;
use crate::ident::Ident;
use crate::llm::LlmError;
use crate::prompt::PromptError;
use crate::schema::{NormalForm, Schema, StructuralError};

pub use checks::{check_1nf, check_2nf, check_3nf, repeating_group_base};
pub use feedback::{render_feedback, FeedbackError};
pub use llm::LlmVerifier;
pub use verdict::{parse_verdict_block, VerdictBlock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AnomalyKind {
    NonAtomic,
    RepeatingGroup,
    MissingPk,
    Partial,
    Transitive,
}

impl AnomalyKind {
    pub const ALL: [AnomalyKind; 5] = [
        AnomalyKind::NonAtomic,
        AnomalyKind::RepeatingGroup,
        AnomalyKind::MissingPk,
        AnomalyKind::Partial,
        AnomalyKind::Transitive,
    ];

    pub fn normal_form(self) -> NormalForm {
        match self {
            AnomalyKind::NonAtomic | AnomalyKind::RepeatingGroup | AnomalyKind::MissingPk => NormalForm::Nf1,
            AnomalyKind::Partial => NormalForm::Nf2,
            AnomalyKind::Transitive => NormalForm::Nf3,
        }
    }

    /// The kind reported when a verdict names only a normal form.
    pub fn default_for(nf: NormalForm) -> Self {
        match nf {
            NormalForm::Nf1 => AnomalyKind::NonAtomic,
            NormalForm::Nf2 => AnomalyKind::Partial,
            NormalForm::Nf3 => AnomalyKind::Transitive,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            AnomalyKind::NonAtomic => "NON_ATOMIC",
            AnomalyKind::RepeatingGroup => "REPEATING_GROUP",
            AnomalyKind::MissingPk => "MISSING_PK",
            AnomalyKind::Partial => "PARTIAL",
            AnomalyKind::Transitive => "TRANSITIVE",
        }
    }
}

impl fmt::Display for AnomalyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for AnomalyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String =
            s.trim().chars().map(|c| if c == '-' || c == ' ' { '_' } else { c.to_ascii_uppercase() }).collect();
        AnomalyKind::ALL.into_iter().find(|k| k.tag() == norm).ok_or_else(|| format!("unknown anomaly kind `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnomalyItem {
    pub normal_form: NormalForm,
    pub kind: AnomalyKind,
    pub table: Ident,
    pub columns: Vec<Ident>,
    pub explanation: String,
    pub suggested_action: String,
}

impl AnomalyItem {
    fn sort_key(&self) -> (NormalForm, &Ident, &[Ident], AnomalyKind) {
        (self.normal_form, &self.table, &self.columns, self.kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BackendKind {
    Deterministic,
    Llm,
}

/// Model traffic behind an LLM-produced report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub prompt: String,
    pub reply_digest: String,
    pub prompt_tokens_est: usize,
    pub parse_retries_used: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub status: BTreeMap<NormalForm, Verdict>,
    pub anomalies: Vec<AnomalyItem>,
    pub backend: BackendKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exchange: Option<Exchange>,
}

impl VerificationReport {
    /// Builds a report whose verdicts follow from `anomalies`: a form fails
    /// when an anomaly at or below it exists. Forms above `target` are not
    /// reported and their anomalies are dropped.
    pub fn from_anomalies(target: NormalForm, mut anomalies: Vec<AnomalyItem>, backend: BackendKind) -> Self {
        anomalies.retain(|a| a.normal_form <= target);
        anomalies.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        anomalies.dedup();
        let first_fail = anomalies.iter().map(|a| a.normal_form).min();
        let status = target
            .up_to()
            .map(|nf| {
                let v = if first_fail.is_some_and(|f| f <= nf) { Verdict::Fail } else { Verdict::Pass };
                (nf, v)
            })
            .collect();
        VerificationReport { status, anomalies, backend, exchange: None }
    }

    pub fn verdict(&self, nf: NormalForm) -> Option<Verdict> {
        self.status.get(&nf).copied()
    }

    /// `true` iff every reported form up to `target` passes.
    pub fn passes(&self, target: NormalForm) -> bool {
        target.up_to().all(|nf| self.verdict(nf) == Some(Verdict::Pass))
    }

    pub fn has_failure(&self) -> bool {
        self.status.values().any(|v| *v == Verdict::Fail)
    }

    pub fn first_failure(&self) -> Option<NormalForm> {
        self.status.iter().find(|(_, v)| **v == Verdict::Fail).map(|(nf, _)| *nf)
    }

    /// FAIL at a form implies FAIL at every higher reported form, and each
    /// failing form is backed by an anomaly at or below it.
    pub fn is_monotone(&self) -> bool {
        let mut failed = false;
        for v in self.status.values() {
            if failed && *v == Verdict::Pass {
                return false;
            }
            failed |= *v == Verdict::Fail;
        }
        match self.first_failure() {
            Some(nf) => self.anomalies.iter().any(|a| a.normal_form <= nf),
            None => true,
        }
    }
}

/// Writes the verdict block: one `NFk: PASS|FAIL` line per reported form,
/// then one `ANOMALY:` line per item.
impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (nf, v) in &self.status {
            writeln!(f, "{}: {v}", nf.tag())?;
        }
        let clean = |s: &str| s.replace('|', "/");
        for a in &self.anomalies {
            let cols: Vec<&str> = a.columns.iter().map(Ident::as_str).collect();
            writeln!(
                f,
                "ANOMALY: {} | {} | {} | {} | {} | {}",
                a.normal_form.tag(),
                a.kind,
                a.table,
                cols.join(", "),
                clean(&a.explanation),
                clean(&a.suggested_action)
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("schema is structurally invalid: {0:?}")]
    Structural(Vec<StructuralError>),
    #[error(transparent)]
    Fd(#[from] FdError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Transport(#[from] LlmError),
    #[error("verifier reply could not be parsed after {attempts} attempts: {message}")]
    ReplyUnparseable { attempts: u32, message: String },
}

impl VerifyError {
    /// Errors from the model transport rather than from the schema.
    pub fn is_backend_failure(&self) -> bool {
        matches!(self, VerifyError::Transport(_) | VerifyError::ReplyUnparseable { .. })
    }
}

pub trait Verifier: Send + Sync {
    fn kind(&self) -> BackendKind;

    fn verify(&self, schema: &Schema, target: NormalForm) -> Result<VerificationReport, VerifyError>;

    /// Verifiers whose output depends on call order.
    fn is_order_sensitive(&self) -> bool {
        false
    }
}

/// Composes the 1NF, 2NF and 3NF checks.
#[derive(Debug, Clone, Copy, Default)]
pub struct DeterministicVerifier;

impl Verifier for DeterministicVerifier {
    fn kind(&self) -> BackendKind {
        BackendKind::Deterministic
    }

    fn verify(&self, schema: &Schema, target: NormalForm) -> Result<VerificationReport, VerifyError> {
        verify_deterministic(schema, target)
    }
}

pub fn verify_deterministic(schema: &Schema, target: NormalForm) -> Result<VerificationReport, VerifyError> {
    let errors = schema.validate();
    if !errors.is_empty() {
        return Err(VerifyError::Structural(errors));
    }
    let mut items = check_1nf(schema);
    if target >= NormalForm::Nf2 {
        items.extend(checks::dependency_items(schema, true, target >= NormalForm::Nf3)?);
    }
    Ok(VerificationReport::from_anomalies(target, items, BackendKind::Deterministic))
}
