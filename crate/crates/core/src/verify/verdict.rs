//! The verdict block a model is asked to reply with:
//!
//! ```text
//! NF1: PASS
//! NF2: FAIL
//! NF3: FAIL
//! ANOMALY: NF2 | PARTIAL | enrollment | course_id, course_title | explanation | suggested action
//! ```
//!
//! Keywords are matched case-insensitively and surrounding prose is ignored.

use std::collections::BTreeMap;

use crate::ident::Ident;
use crate::schema::NormalForm;

use super::{AnomalyItem, AnomalyKind, BackendKind, Verdict, VerificationReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictBlock {
    pub status: BTreeMap<NormalForm, Verdict>,
    pub anomalies: Vec<AnomalyItem>,
}

impl VerdictBlock {
    /// Converts to a report, clamped so that verdicts are monotone and every
    /// failing form is backed by an anomaly.
    pub fn into_report(self, target: NormalForm, backend: BackendKind) -> VerificationReport {
        let mut anomalies = self.anomalies;
        anomalies.retain(|a| a.normal_form <= target);
        let first_verdict_fail =
            self.status.iter().filter(|(nf, v)| **nf <= target && **v == Verdict::Fail).map(|(nf, _)| *nf).min();
        let first_item = anomalies.iter().map(|a| a.normal_form).min();
        if let Some(nf) = first_verdict_fail {
            if first_item.is_none_or(|i| i > nf) {
                anomalies.push(AnomalyItem {
                    normal_form: nf,
                    kind: AnomalyKind::default_for(nf),
                    table: Ident::new(""),
                    columns: Vec::new(),
                    explanation: format!("the verifier judged {nf} violated without naming the anomaly"),
                    suggested_action: format!("review every table against the {nf} requirement"),
                });
            }
        }
        VerificationReport::from_anomalies(target, anomalies, backend)
    }
}

fn strip_decoration(line: &str) -> &str {
    line.trim().trim_start_matches(['*', '-', '#', '>', '`', ' ']).trim_end_matches(['*', '`', ' '])
}

fn parse_form(token: &str) -> Option<NormalForm> {
    let t = token.trim().trim_matches('*').to_ascii_uppercase();
    let digit = t.strip_prefix("NF").or_else(|| t.strip_suffix("NF"))?;
    digit.parse::<u8>().ok().and_then(NormalForm::from_level)
}

fn parse_verdict_line(line: &str) -> Option<(NormalForm, Verdict)> {
    let (head, tail) = line.split_once(':')?;
    let nf = parse_form(head)?;
    let word: String = tail.trim().trim_matches(['*', '`']).chars().take_while(|c| c.is_ascii_alphabetic()).collect();
    let verdict = match word.to_ascii_uppercase().as_str() {
        "PASS" => Verdict::Pass,
        "FAIL" => Verdict::Fail,
        _ => return None,
    };
    Some((nf, verdict))
}

fn parse_anomaly_line(body: &str) -> Result<AnomalyItem, String> {
    let fields: Vec<&str> = body.split('|').map(str::trim).collect();
    let get = |i: usize| fields.get(i).copied().unwrap_or("");
    let nf = parse_form(get(0));
    let kind = get(1).parse::<AnomalyKind>().ok();
    let (normal_form, kind) = match (nf, kind) {
        (Some(nf), Some(k)) if k.normal_form() == nf => (nf, k),
        (Some(nf), _) => (nf, AnomalyKind::default_for(nf)),
        (None, Some(k)) => (k.normal_form(), k),
        (None, None) => return Err(format!("anomaly line `{body}` names neither a normal form nor a kind")),
    };
    let columns = get(3)
        .split(',')
        .map(|c| c.trim().trim_matches(['(', ')', '`']))
        .filter(|c| !c.is_empty())
        .map(Ident::new)
        .collect();
    Ok(AnomalyItem {
        normal_form,
        kind,
        table: Ident::new(get(2).trim_matches('`')),
        columns,
        explanation: get(4).to_string(),
        suggested_action: get(5).to_string(),
    })
}

/// Reads the verdict block out of `reply`. A verdict is required for every
/// form up to `target`; the first verdict seen for a form wins.
pub fn parse_verdict_block(reply: &str, target: NormalForm) -> Result<VerdictBlock, String> {
    let mut status = BTreeMap::new();
    let mut anomalies = Vec::new();
    for raw in reply.lines() {
        let line = strip_decoration(raw);
        if line.get(..8).is_some_and(|p| p.eq_ignore_ascii_case("ANOMALY:")) {
            anomalies.push(parse_anomaly_line(&line[8..])?);
        } else if let Some((nf, v)) = parse_verdict_line(line) {
            status.entry(nf).or_insert(v);
        }
    }
    let missing: Vec<String> =
        target.up_to().filter(|nf| !status.contains_key(nf)).map(|nf| nf.tag().to_string()).collect();
    if !missing.is_empty() {
        return Err(format!("missing verdict line for {}", missing.join(", ")));
    }
    status.retain(|nf, _| *nf <= target);
    Ok(VerdictBlock { status, anomalies })
}
