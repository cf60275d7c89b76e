//! Prompt templates for the generation and verification roles.
//!
//! Templates are plain text with `{schema}`, `{feedback}` and `{target_nf}`
//! placeholders. Doubled braces `{{` and `}}` stand for literal braces.

mod templates;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ddl::emit_ddl;
use crate::schema::{NormalForm, Schema, StructuralError};

/// Header placed above feedback carried over from the previous attempt.
pub const FEEDBACK_HEADER: &str = "PREVIOUS VERIFICATION FEEDBACK:";

/// Marker that opens each worked example.
pub const EXAMPLE_MARKER: &str = "### Example";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PromptRole {
    Generation,
    Verification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ShotMode {
    #[default]
    Zero,
    One,
    Few,
}

impl ShotMode {
    pub const ALL: [ShotMode; 3] = [ShotMode::Zero, ShotMode::One, ShotMode::Few];
}

impl fmt::Display for ShotMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShotMode::Zero => "0",
            ShotMode::One => "1",
            ShotMode::Few => "few",
        })
    }
}

impl FromStr for ShotMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "0" | "zero" => Ok(ShotMode::Zero),
            "1" | "one" => Ok(ShotMode::One),
            "few" | "3" => Ok(ShotMode::Few),
            other => Err(format!("unknown shot mode `{other}` (expected 0, 1 or few)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("template placeholder `{{{0}}}` cannot be resolved")]
    UnresolvedPlaceholder(String),
    #[error("template has an unmatched brace at byte {0}")]
    UnmatchedBrace(usize),
    #[error("template never mentions {{schema}}")]
    MissingSchemaPlaceholder,
    #[error("schema cannot be emitted: {0:?}")]
    Schema(Vec<StructuralError>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub role: PromptRole,
    pub shot_mode: ShotMode,
    pub body: String,
}

impl PromptTemplate {
    /// The bundled template for `role` and `shot_mode`.
    pub fn builtin(role: PromptRole, shot_mode: ShotMode) -> Self {
        use templates::*;
        let (head, rules, tail, one, few): (_, _, _, &[&str], &[&str]) = match role {
            PromptRole::Generation => {
                (GENERATION_HEAD, GENERATION_RULES, GENERATION_TAIL, &GENERATION_ONE, &GENERATION_FEW)
            }
            PromptRole::Verification => {
                (VERIFICATION_HEAD, VERIFICATION_RULES, VERIFICATION_TAIL, &VERIFICATION_ONE, &VERIFICATION_FEW)
            }
        };
        let examples = match shot_mode {
            ShotMode::Zero => &[][..],
            ShotMode::One => one,
            ShotMode::Few => few,
        };
        let mut body = String::from(head);
        body.push_str(REQUIREMENTS);
        body.push_str(rules);
        if !examples.is_empty() {
            body.push('\n');
            for ex in examples {
                body.push_str(&escape_braces(ex));
                body.push('\n');
            }
        }
        body.push_str(tail);
        PromptTemplate { role, shot_mode, body }
    }

    /// A template read from user-supplied text. It must mention `{schema}`
    /// and use no other placeholders than the three known ones.
    pub fn custom(role: PromptRole, shot_mode: ShotMode, body: impl Into<String>) -> Result<Self, PromptError> {
        let body = body.into();
        let names = placeholders(&body)?;
        if let Some(bad) = names.iter().find(|n| !KNOWN.contains(&n.as_str())) {
            return Err(PromptError::UnresolvedPlaceholder(bad.clone()));
        }
        if !names.iter().any(|n| n == "schema") {
            return Err(PromptError::MissingSchemaPlaceholder);
        }
        Ok(PromptTemplate { role, shot_mode, body })
    }

    /// Number of worked examples in the body.
    pub fn example_count(&self) -> usize {
        count_examples(&self.body)
    }
}

const KNOWN: [&str; 3] = ["schema", "feedback", "target_nf"];

fn escape_braces(s: &str) -> String {
    s.replace('{', "{{").replace('}', "}}")
}

enum Piece<'a> {
    Text(&'a str),
    Brace(char),
    Slot(&'a str),
}

fn pieces(body: &str) -> Result<Vec<Piece<'_>>, PromptError> {
    let mut out = Vec::new();
    let bytes = body.as_bytes();
    let mut start = 0;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'{' if bytes.get(i + 1) == Some(&b'{') => {
                out.push(Piece::Text(&body[start..i]));
                out.push(Piece::Brace('{'));
                i += 2;
                start = i;
            }
            b'}' if bytes.get(i + 1) == Some(&b'}') => {
                out.push(Piece::Text(&body[start..i]));
                out.push(Piece::Brace('}'));
                i += 2;
                start = i;
            }
            b'{' => {
                let end = body[i + 1..].find('}').ok_or(PromptError::UnmatchedBrace(i))? + i + 1;
                let name = &body[i + 1..end];
                if name.is_empty() || !name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
                    return Err(PromptError::UnmatchedBrace(i));
                }
                out.push(Piece::Text(&body[start..i]));
                out.push(Piece::Slot(name));
                i = end + 1;
                start = i;
            }
            b'}' => return Err(PromptError::UnmatchedBrace(i)),
            _ => i += 1,
        }
    }
    out.push(Piece::Text(&body[start..]));
    Ok(out)
}

fn placeholders(body: &str) -> Result<Vec<String>, PromptError> {
    Ok(pieces(body)?
        .into_iter()
        .filter_map(|p| match p {
            Piece::Slot(n) => Some(n.to_string()),
            _ => None,
        })
        .collect())
}

fn feedback_section(feedback: Option<&str>) -> String {
    match feedback {
        Some(text) => {
            let mut s = format!("\n{FEEDBACK_HEADER}\n{text}");
            if !text.ends_with('\n') {
                s.push('\n');
            }
            s
        }
        None => String::new(),
    }
}

/// Fills `template` in a single pass, so placeholder-like text inside the
/// schema or feedback is never expanded. Feedback is appended at the end when
/// the template has no `{feedback}` slot.
pub fn build_prompt(
    template: &PromptTemplate,
    schema: &Schema,
    feedback: Option<&str>,
    target: NormalForm,
) -> Result<String, PromptError> {
    let ddl = emit_ddl(schema).map_err(PromptError::Schema)?;
    let fb = feedback_section(feedback);
    let mut out = String::with_capacity(template.body.len() + ddl.len() + fb.len());
    let mut saw_schema = false;
    let mut saw_feedback = false;
    for piece in pieces(&template.body)? {
        match piece {
            Piece::Text(t) => out.push_str(t),
            Piece::Brace(c) => out.push(c),
            Piece::Slot("schema") => {
                saw_schema = true;
                out.push_str(&ddl);
            }
            Piece::Slot("feedback") => {
                saw_feedback = true;
                out.push_str(&fb);
            }
            Piece::Slot("target_nf") => out.push_str(&target.to_string()),
            Piece::Slot(other) => return Err(PromptError::UnresolvedPlaceholder(other.to_string())),
        }
    }
    if !saw_schema {
        return Err(PromptError::MissingSchemaPlaceholder);
    }
    if !saw_feedback && feedback.is_some() {
        out.push_str(&fb);
    }
    Ok(out)
}

/// Follow-up sent when a reply cannot be used.
pub fn retry_message(error: &str, expected: &str) -> String {
    format!("Your previous reply could not be used: {error}. Reply again with {expected}.")
}

/// `ceil(chars / 4)` after collapsing whitespace runs to one space.
pub fn estimate_tokens(text: &str) -> usize {
    let mut chars = 0usize;
    let mut in_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            if !in_space {
                chars += 1;
            }
            in_space = true;
        } else {
            chars += 1;
            in_space = false;
        }
    }
    chars.div_ceil(4)
}

pub fn count_examples(text: &str) -> usize {
    text.lines().filter(|l| l.starts_with(EXAMPLE_MARKER)).count()
}
