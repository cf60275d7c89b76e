use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fd::TableAnalysis;
use crate::ident::Ident;
use crate::refine::{semantic_fds, RefinementTranscript};
use crate::schema::{AttributeSet, FunctionalDependency, NormalForm, Schema, Table};
use crate::verify::{repeating_group_base, AnomalyItem, AnomalyKind, VerificationReport};

use super::inject::{AnomalyRecord, GroundTruth};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_index: u32,
    pub eliminated: Vec<bool>,
    pub detected: Vec<bool>,
    pub attempts_used: u32,
    pub converged: bool,
    pub tokens_est: usize,
}

impl TrialResult {
    pub fn eliminated_count(&self) -> usize {
        self.eliminated.iter().filter(|e| **e).count()
    }

    pub fn detected_count(&self) -> usize {
        self.detected.iter().filter(|d| **d).count()
    }

    pub fn all_eliminated(&self) -> bool {
        self.eliminated.iter().all(|e| *e)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("transcript was not produced from the mutated schema of this ground truth")]
    TranscriptMismatch,
}

fn overlap(table: &Table, site: &AttributeSet) -> usize {
    table.column_names().filter(|c| site.contains(c)).count()
}

/// Tables of `schema` that correspond to the site table `name` with columns
/// `site`: the table of that name, the tables sharing the most columns with
/// the site, and any table at least half of whose columns come from the site.
pub fn site_tables<'a>(schema: &'a Schema, name: &Ident, site: &AttributeSet) -> Vec<&'a Table> {
    let best = schema.tables.iter().map(|t| overlap(t, site)).max().unwrap_or(0);
    schema
        .tables
        .iter()
        .filter(|t| {
            let o = overlap(t, site);
            t.name == *name || (o > 0 && (o == best || 2 * o >= t.columns.len()))
        })
        .collect()
}

fn site_of(truth: &GroundTruth, record: &AnomalyRecord) -> AttributeSet {
    truth
        .mutated_schema
        .table(record.table.as_str())
        .map(Table::column_set)
        .unwrap_or_else(|| record.columns.iter().cloned().collect())
}

fn item_matches(item: &AnomalyItem, record: &AnomalyRecord, site: &AttributeSet, verified: &Schema) -> bool {
    if item.normal_form != record.normal_form || !item.columns.iter().any(|c| record.columns.contains(c)) {
        return false;
    }
    site_tables(verified, &record.table, site).iter().any(|t| t.name == item.table)
}

fn detected(truth: &GroundTruth, transcript: &RefinementTranscript, record: &AnomalyRecord) -> bool {
    let site = site_of(truth, record);
    let mut pairs: Vec<(&Schema, &VerificationReport)> = Vec::new();
    if let Some(r) = &transcript.input_report {
        pairs.push((&transcript.input_schema, r));
    }
    for a in &transcript.attempts {
        if let (Some(s), Some(r)) = (a.outcome.schema(), &a.report) {
            pairs.push((s, r));
        }
    }
    pairs.iter().any(|(s, r)| r.anomalies.iter().any(|i| item_matches(i, record, &site, s)))
}

fn with_group_bases(schema: &Schema) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for name in schema.attribute_names().iter() {
        out.insert(name.key());
        if let Some(base) = repeating_group_base(name.as_str()) {
            out.insert(base.to_ascii_lowercase());
        }
    }
    out
}

struct Elimination<'a> {
    truth: &'a GroundTruth,
    final_schema: &'a Schema,
    present: BTreeSet<String>,
    base_attributes: AttributeSet,
    fds: Vec<FunctionalDependency>,
    analyses: HashMap<usize, Option<TableAnalysis>>,
}

impl<'a> Elimination<'a> {
    fn new(truth: &'a GroundTruth, final_schema: &'a Schema) -> Self {
        let mut fds = semantic_fds(&truth.mutated_schema);
        fds.extend(semantic_fds(&truth.base_schema));
        fds.sort();
        fds.dedup();
        Elimination {
            truth,
            final_schema,
            present: with_group_bases(final_schema),
            base_attributes: truth.base_schema.attribute_names(),
            fds,
            analyses: HashMap::new(),
        }
    }

    fn preserved(&self, record: &AnomalyRecord) -> bool {
        self.base_attributes
            .iter()
            .chain(record.introduced_attributes().iter())
            .all(|a| self.present.contains(&a.key()))
    }

    /// Whether some output table, taken without its declared key, still has
    /// `dependent` depending on a subset of `lhs` in a 2NF or 3NF violation.
    fn dependency_remains(&mut self, lhs: &AttributeSet, dependent: &Ident) -> bool {
        for (i, table) in self.final_schema.tables.iter().enumerate() {
            if !table.has_column(dependent.as_str()) {
                continue;
            }
            let fds = &self.fds;
            let analysis = self.analyses.entry(i).or_insert_with(|| {
                let columns: Vec<Ident> = table.column_names().cloned().collect();
                TableAnalysis::for_columns(table.name.clone(), &columns, fds).ok()
            });
            let Some(analysis) = analysis else { return true };
            let hit = analysis
                .partial_dependencies()
                .iter()
                .chain(analysis.transitive_dependencies().iter())
                .any(|v| v.dependent == *dependent && v.determinant.is_subset(lhs));
            if hit {
                return true;
            }
        }
        false
    }

    fn pattern_absent(&self, record: &AnomalyRecord) -> bool {
        let tables = &self.final_schema.tables;
        match record.kind {
            AnomalyKind::NonAtomic => record.columns.iter().all(|col| {
                tables
                    .iter()
                    .filter_map(|t| t.column(col.as_str()).map(|c| (t, c)))
                    .all(|(t, c)| !c.is_multivalued() && t.primary_key.as_ref().is_some_and(|k| k.contains(col)))
            }),
            AnomalyKind::RepeatingGroup => {
                let Some(base) = record.introduced_attributes().into_iter().next() else { return false };
                tables.iter().all(|t| {
                    t.column_names()
                        .filter(|c| {
                            repeating_group_base(c.as_str()).is_some_and(|b| b.eq_ignore_ascii_case(base.as_str()))
                        })
                        .count()
                        < 2
                })
            }
            AnomalyKind::MissingPk => {
                let site = site_of(self.truth, record);
                let mapped = site_tables(self.final_schema, &record.table, &site);
                !mapped.is_empty() && mapped.iter().all(|t| t.primary_key.is_some())
            }
            AnomalyKind::Partial | AnomalyKind::Transitive => true,
        }
    }

    fn eliminated(&mut self, record: &AnomalyRecord) -> bool {
        if !self.preserved(record) {
            return false;
        }
        match record.normal_form {
            NormalForm::Nf1 => self.pattern_absent(record),
            NormalForm::Nf2 | NormalForm::Nf3 => !record.injected_fds.iter().any(|fd| {
                let lhs = fd.lhs.clone();
                fd.rhs.iter().any(|d| self.dependency_remains(&lhs, d))
            }),
        }
    }
}

/// Scores one refinement run against the anomalies planted in its input.
/// Detection is read from every verification report of the run,
/// elimination from the final schema.
pub fn score_trial(truth: &GroundTruth, transcript: &RefinementTranscript) -> Result<TrialResult, ScoreError> {
    if transcript.input_schema != truth.mutated_schema {
        return Err(ScoreError::TranscriptMismatch);
    }
    let detected = truth.records.iter().map(|r| detected(truth, transcript, r)).collect();
    let mut elimination = Elimination::new(truth, &transcript.final_schema);
    let eliminated = truth.records.iter().map(|r| elimination.eliminated(r)).collect();
    Ok(TrialResult {
        trial_index: 0,
        eliminated,
        detected,
        attempts_used: transcript.attempts.len() as u32,
        converged: transcript.converged,
        tokens_est: transcript.total_prompt_tokens_est,
    })
}
