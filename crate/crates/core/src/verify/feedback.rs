use std::fmt::Write as _;

use thiserror::Error;

use crate::ident::Ident;

use super::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("report has no failing normal form; there is nothing to feed back")]
pub struct FeedbackError;

/// One numbered line per anomaly, ordered by normal form, table and columns.
pub fn render_feedback(report: &VerificationReport) -> Result<String, FeedbackError> {
    if !report.has_failure() {
        return Err(FeedbackError);
    }
    let mut items: Vec<_> = report.anomalies.iter().collect();
    items.sort_by(|a, b| {
        (a.normal_form, &a.table, &a.columns, a.kind).cmp(&(b.normal_form, &b.table, &b.columns, b.kind))
    });
    let mut out = String::new();
    for (i, item) in items.iter().enumerate() {
        let cols: Vec<&str> = item.columns.iter().map(Ident::as_str).collect();
        let _ = writeln!(
            out,
            "{}. [{}] {} in {} ({}): {}. Action: {}.",
            i + 1,
            item.normal_form,
            item.kind,
            item.table,
            cols.join(", "),
            item.explanation.trim_end_matches('.'),
            item.suggested_action.trim_end_matches('.'),
        );
    }
    Ok(out)
}
