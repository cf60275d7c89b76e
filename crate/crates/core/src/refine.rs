//! The generate, verify, feed back loop.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fd::closure;
use crate::normalize::{GenerateError, GenerationOutcome, GenerationRequest, Generator};
use crate::prompt::ShotMode;
use crate::schema::{FunctionalDependency, NormalForm, Schema, StructuralError};
use crate::verify::{render_feedback, VerificationReport, Verifier};

pub const DEFAULT_MAX_ATTEMPTS: u32 = 3;
pub const DEFAULT_HARD_CAP: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementConfig {
    pub max_attempts: u32,
    pub hard_cap: u32,
    pub target: NormalForm,
    pub shot_mode: ShotMode,
    /// Verify the input before the first attempt, so detection can be
    /// judged on the schema as given.
    pub screen_input: bool,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig {
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            hard_cap: DEFAULT_HARD_CAP,
            target: NormalForm::Nf3,
            shot_mode: ShotMode::Zero,
            screen_input: true,
        }
    }
}

impl RefinementConfig {
    pub fn with_max_attempts(mut self, n: u32) -> Self {
        self.max_attempts = n;
        self
    }

    pub fn validate(&self) -> Result<(), RefineError> {
        if self.max_attempts == 0 || self.max_attempts > self.hard_cap {
            return Err(RefineError::InvalidConfig { max_attempts: self.max_attempts, hard_cap: self.hard_cap });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AttemptOutcome {
    Generated(GenerationOutcome),
    GenerationFailed { message: String, prompt: String, raw_reply: Option<String>, prompt_tokens_est: usize },
}

impl AttemptOutcome {
    pub fn schema(&self) -> Option<&Schema> {
        match self {
            AttemptOutcome::Generated(o) => Some(&o.schema),
            AttemptOutcome::GenerationFailed { .. } => None,
        }
    }

    pub fn prompt_tokens_est(&self) -> usize {
        match self {
            AttemptOutcome::Generated(o) => o.prompt_tokens_est,
            AttemptOutcome::GenerationFailed { prompt_tokens_est, .. } => *prompt_tokens_est,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub index: u32,
    pub outcome: AttemptOutcome,
    pub report: Option<VerificationReport>,
    pub feedback_sent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementTranscript {
    pub input_schema: Schema,
    pub input_report: Option<VerificationReport>,
    pub attempts: Vec<AttemptRecord>,
    pub converged: bool,
    /// Set when a backend error ended the run early.
    pub aborted: Option<String>,
    pub final_schema: Schema,
    pub total_prompt_tokens_est: usize,
}

impl RefinementTranscript {
    /// Reports from the input screening and from every attempt, in order.
    pub fn reports(&self) -> impl Iterator<Item = &VerificationReport> {
        self.input_report.iter().chain(self.attempts.iter().filter_map(|a| a.report.as_ref()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }
}

#[derive(Debug, Error)]
pub enum RefineError {
    #[error("max_attempts {max_attempts} must be between 1 and the hard cap {hard_cap}")]
    InvalidConfig { max_attempts: u32, hard_cap: u32 },
    #[error("input schema is structurally invalid: {0:?}")]
    InvalidInput(Vec<StructuralError>),
}

/// Dependencies the schema asserts, as global dependencies over bare column
/// names: its explicit ones plus `pk -> column` for every declared key,
/// leaving out multivalued columns.
pub fn semantic_fds(schema: &Schema) -> Vec<FunctionalDependency> {
    let mut out = schema.lifted_fds(false);
    for table in &schema.tables {
        let Some(pk) = &table.primary_key else { continue };
        let rhs: Vec<_> = table
            .columns
            .iter()
            .filter(|c| !pk.contains(&c.name) && !c.is_multivalued())
            .map(|c| c.name.clone())
            .collect();
        if !rhs.is_empty() {
            out.push(FunctionalDependency::new(pk.clone(), rhs));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Adds to `generated` each dependency of `required` that its own
/// dependencies and keys do not already imply, so that dependencies a model
/// dropped are still checked. Dependencies naming columns that no longer
/// exist are skipped.
pub fn reattach_dependencies(required: &[FunctionalDependency], mut generated: Schema) -> Schema {
    let known = semantic_fds(&generated);
    let present = generated.attribute_names();
    let mut added = false;
    for fd in required {
        if !fd.attributes().is_subset(&present) {
            continue;
        }
        if fd.rhs.is_subset(&closure(&fd.lhs, &known)) {
            continue;
        }
        generated.fds.push(FunctionalDependency { scope: None, ..fd.clone() });
        added = true;
    }
    if added {
        generated.canonicalize().unwrap_or(generated)
    } else {
        generated
    }
}

fn report_tokens(report: &VerificationReport) -> usize {
    report.exchange.as_ref().map_or(0, |e| e.prompt_tokens_est)
}

/// Runs attempts until the verifier passes `config.target` or
/// `config.max_attempts` is reached. Each attempt regenerates from the
/// latest generated schema with the feedback of the latest report.
pub fn run_refinement(
    schema: &Schema,
    generator: &dyn Generator,
    verifier: &dyn Verifier,
    config: &RefinementConfig,
) -> Result<RefinementTranscript, RefineError> {
    config.validate()?;
    let errors = schema.validate();
    if !errors.is_empty() {
        return Err(RefineError::InvalidInput(errors));
    }
    let required = semantic_fds(schema);
    let target = config.target;
    let mut transcript = RefinementTranscript {
        input_schema: schema.clone(),
        input_report: None,
        attempts: Vec::new(),
        converged: false,
        aborted: None,
        final_schema: schema.clone(),
        total_prompt_tokens_est: 0,
    };

    if config.screen_input {
        match verifier.verify(schema, target) {
            Ok(r) => {
                transcript.total_prompt_tokens_est += report_tokens(&r);
                transcript.input_report = Some(r);
            }
            Err(e) => {
                transcript.aborted = Some(e.to_string());
                return Ok(transcript);
            }
        }
    }

    let mut current = schema.clone();
    let mut feedback: Option<String> = None;
    for index in 1..=config.max_attempts {
        let request = GenerationRequest {
            schema: current.clone(),
            feedback: feedback.clone(),
            target,
            shot_mode: config.shot_mode,
        };
        let mut outcome = match generator.generate(&request) {
            Ok(o) => o,
            Err(GenerateError::Failed { message, prompt, raw_reply, prompt_tokens_est, .. }) => {
                tracing::info!(index, %message, "generation failed");
                transcript.total_prompt_tokens_est += prompt_tokens_est;
                transcript.attempts.push(AttemptRecord {
                    index,
                    outcome: AttemptOutcome::GenerationFailed { message, prompt, raw_reply, prompt_tokens_est },
                    report: None,
                    feedback_sent: feedback.clone(),
                });
                continue;
            }
            Err(e) => {
                transcript.aborted = Some(e.to_string());
                break;
            }
        };
        outcome.schema = reattach_dependencies(&required, outcome.schema);
        transcript.total_prompt_tokens_est += outcome.prompt_tokens_est;
        let report = match verifier.verify(&outcome.schema, target) {
            Ok(r) => r,
            Err(e) if e.is_backend_failure() => {
                transcript.attempts.push(AttemptRecord {
                    index,
                    outcome: AttemptOutcome::Generated(outcome),
                    report: None,
                    feedback_sent: feedback.clone(),
                });
                transcript.aborted = Some(e.to_string());
                break;
            }
            Err(e) => {
                // Unverifiable output: retry from the previous schema.
                tracing::info!(index, error = %e, "generated schema rejected");
                transcript.attempts.push(AttemptRecord {
                    index,
                    outcome: AttemptOutcome::Generated(outcome),
                    report: None,
                    feedback_sent: feedback.clone(),
                });
                continue;
            }
        };
        current = outcome.schema.clone();
        transcript.final_schema = outcome.schema.clone();
        transcript.total_prompt_tokens_est += report_tokens(&report);
        let passed = report.passes(target);
        let next_feedback = if passed { None } else { render_feedback(&report).ok() };
        transcript.attempts.push(AttemptRecord {
            index,
            outcome: AttemptOutcome::Generated(outcome),
            report: Some(report),
            feedback_sent: feedback.clone(),
        });
        if passed {
            break;
        }
        feedback = next_feedback;
    }

    transcript.converged = transcript.aborted.is_none()
        && transcript.attempts.last().and_then(|a| a.report.as_ref()).is_some_and(|r| r.passes(target));
    Ok(transcript)
}
