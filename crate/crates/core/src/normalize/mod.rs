//! Schema generation: a deterministic normalizer and an LLM-backed generator
//! behind one trait.

mod llm;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fd::{project_fds, synthesize_3nf, FdError, TableAnalysis};
use crate::ident::Ident;
use crate::llm::LlmError;
use crate::prompt::{PromptError, ShotMode};
use crate::schema::{
    key_dependency, AttributeSet, Column, ColumnAnnotation, DataType, ForeignKey, FunctionalDependency, NormalForm,
    Schema, StructuralError, Table,
};
use crate::verify::{repeating_group_base, BackendKind};

pub use llm::LlmGenerator;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("schema is structurally invalid: {0:?}")]
    Structural(Vec<StructuralError>),
    #[error(transparent)]
    Fd(#[from] FdError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRequest {
    pub schema: Schema,
    pub feedback: Option<String>,
    pub target: NormalForm,
    pub shot_mode: ShotMode,
}

impl GenerationRequest {
    pub fn new(schema: Schema, target: NormalForm) -> Self {
        GenerationRequest { schema, feedback: None, target, shot_mode: ShotMode::Zero }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationOutcome {
    pub schema: Schema,
    #[serde(default)]
    pub prompt: Option<String>,
    #[serde(default)]
    pub raw_reply: Option<String>,
    #[serde(default)]
    pub reply_digest: Option<String>,
    pub prompt_tokens_est: usize,
    pub parse_retries_used: u32,
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("generation failed after {attempts} tries: {message}")]
    Failed { attempts: u32, message: String, prompt: String, raw_reply: Option<String>, prompt_tokens_est: usize },
    #[error(transparent)]
    Transport(#[from] LlmError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
}

pub trait Generator: Send + Sync {
    fn kind(&self) -> BackendKind;

    fn generate(&self, request: &GenerationRequest) -> Result<GenerationOutcome, GenerateError>;

    /// Generators whose output depends on call order.
    fn is_order_sensitive(&self) -> bool {
        false
    }
}

/// Ignores feedback and returns [`deterministic_normalize`] of the schema.
#[derive(Debug, Clone, Copy, Default)]
pub struct DeterministicGenerator;

impl Generator for DeterministicGenerator {
    fn kind(&self) -> BackendKind {
        BackendKind::Deterministic
    }

    fn generate(&self, request: &GenerationRequest) -> Result<GenerationOutcome, GenerateError> {
        Ok(GenerationOutcome {
            schema: deterministic_normalize(&request.schema)?,
            prompt: None,
            raw_reply: None,
            reply_digest: None,
            prompt_tokens_est: 0,
            parse_retries_used: 0,
        })
    }
}

fn fresh(base: String, taken: &[Ident]) -> Ident {
    let first = Ident::new(base.clone());
    if !taken.contains(&first) {
        return first;
    }
    (2..).map(|n| Ident::new(format!("{base}_x{n}"))).find(|c| !taken.contains(c)).expect("unbounded name search")
}

fn key_columns(table: &Table, pk: &[Ident]) -> Vec<Column> {
    pk.iter()
        .filter_map(|k| table.column(k.as_str()))
        .map(|c| Column { annotations: Vec::new(), ..c.clone() })
        .collect()
}

/// Child tables for multivalued columns and repeating groups, removed from
/// `table`. `table` must have a primary key.
fn split_first_normal_form(table: &mut Table, taken: &mut Vec<Ident>) -> Vec<Table> {
    let pk = table.primary_key.clone().unwrap_or_default();
    let mut children = Vec::new();

    let multivalued: Vec<Column> =
        table.columns.iter().filter(|c| c.is_multivalued() && !pk.contains(&c.name)).cloned().collect();
    for col in multivalued {
        table.columns.retain(|c| c.name != col.name);
        let name = fresh(format!("{}_{}", table.name, col.name), taken);
        taken.push(name.clone());
        let mut columns = key_columns(table, &pk);
        let atomic = Column {
            annotations: col.annotations.iter().filter(|a| **a != ColumnAnnotation::Multivalued).cloned().collect(),
            nullable: false,
            ..col.clone()
        };
        columns.push(atomic);
        let mut child_pk = pk.clone();
        child_pk.push(col.name.clone());
        children.push(Table {
            name,
            columns,
            primary_key: Some(child_pk),
            foreign_keys: vec![ForeignKey {
                columns: pk.clone(),
                referenced_table: table.name.clone(),
                referenced_columns: pk.clone(),
            }],
        });
    }
    for col in table.columns.iter_mut().filter(|c| pk.contains(&c.name)) {
        col.annotations.retain(|a| *a != ColumnAnnotation::Multivalued);
    }

    let mut groups: Vec<(String, DataType, Vec<Ident>)> = Vec::new();
    for col in table.columns.iter().filter(|c| !pk.contains(&c.name)) {
        let Some(base) = repeating_group_base(col.name.as_str()) else { continue };
        match groups.iter_mut().find(|(b, t, _)| b.eq_ignore_ascii_case(base) && *t == col.data_type) {
            Some((_, _, members)) => members.push(col.name.clone()),
            None => groups.push((base.to_string(), col.data_type.clone(), vec![col.name.clone()])),
        }
    }
    for (base, data_type, members) in groups.into_iter().filter(|g| g.2.len() >= 2) {
        table.columns.retain(|c| !members.contains(&c.name));
        let name = fresh(format!("{}_{}", table.name, base), taken);
        taken.push(name.clone());
        let mut columns = key_columns(table, &pk);
        let used: Vec<Ident> = columns.iter().map(|c| c.name.clone()).collect();
        let seq = fresh("seq".into(), &used);
        columns.push(Column::new(seq.clone(), DataType::Int).not_null());
        let mut value_taken = used;
        value_taken.push(seq.clone());
        columns.push(Column::new(fresh(base, &value_taken), data_type));
        let mut child_pk = pk.clone();
        child_pk.push(seq);
        children.push(Table {
            name,
            columns,
            primary_key: Some(child_pk),
            foreign_keys: vec![ForeignKey {
                columns: pk.clone(),
                referenced_table: table.name.clone(),
                referenced_columns: pk.clone(),
            }],
        });
    }
    children
}

/// Renames `from` to `to` in the names and intra-group foreign keys of `tables`.
fn rename(tables: &mut [Table], from: &Ident, to: &Ident) {
    for t in tables.iter_mut() {
        if t.name == *from {
            t.name = to.clone();
        }
        for fk in &mut t.foreign_keys {
            if fk.referenced_table == *from {
                fk.referenced_table = to.clone();
            }
        }
    }
}

/// Dependencies of `table` restricted to its columns and not implied by its
/// primary key alone, scoped to the table.
fn table_fds(table: &Table, context: &[FunctionalDependency]) -> Result<Vec<FunctionalDependency>, FdError> {
    let pk: AttributeSet = table.primary_key.iter().flatten().cloned().collect();
    Ok(project_fds(context, &table.column_set())?
        .into_iter()
        .filter(|fd| pk.is_empty() || !pk.is_subset(&fd.lhs))
        .map(|fd| fd.scoped(table.name.clone()))
        .collect())
}

/// Normalizes every table to 3NF.
///
/// Per table: a missing primary key becomes the first candidate key (all
/// columns when there is none); multivalued columns and repeating groups
/// move to child tables keyed by the parent key plus the value (or a `seq`
/// column); the rest is decomposed with [`synthesize_3nf`]. Foreign keys
/// into a decomposed table are pointed at the fragment holding the
/// referenced columns. Dependencies are kept per output table.
pub fn deterministic_normalize(schema: &Schema) -> Result<Schema, NormalizeError> {
    let errors = schema.validate();
    if !errors.is_empty() {
        return Err(NormalizeError::Structural(errors));
    }
    let mut taken: Vec<Ident> = schema.tables.iter().map(|t| t.name.clone()).collect();
    let mut fragments_of: BTreeMap<Ident, Vec<Ident>> = BTreeMap::new();
    let mut tables: Vec<Table> = Vec::new();
    let mut fds: Vec<FunctionalDependency> = Vec::new();

    for source in &schema.tables {
        let context = schema.fds_for_table(source);
        let mut table = source.clone();
        if table.primary_key.is_none() {
            let analysis = TableAnalysis::new(&table, &context)?;
            let key = analysis.candidate_keys().into_iter().next();
            table.primary_key = Some(match key {
                Some(k) => table.column_names().filter(|c| k.contains(c)).cloned().collect(),
                None => table.column_names().cloned().collect(),
            });
        }
        let children = split_first_normal_form(&mut table, &mut taken);
        let mut full_context = context.clone();
        full_context.extend(key_dependency(&table));

        let mut parts = synthesize_3nf(&table, &context)?;
        for i in 0..parts.len() {
            let name = parts[i].name.clone();
            if name != source.name && taken.contains(&name) {
                let to = fresh(name.to_string(), &taken);
                rename(&mut parts, &name, &to);
            }
            if parts[i].name != source.name {
                taken.push(parts[i].name.clone());
            }
        }
        for part in &parts {
            fds.extend(table_fds(part, &full_context)?);
        }
        fragments_of.insert(source.name.clone(), parts.iter().map(|t| t.name.clone()).collect());
        tables.extend(parts);
        tables.extend(children);
    }

    let shapes: BTreeMap<Ident, (Vec<Ident>, AttributeSet)> =
        tables.iter().map(|t| (t.name.clone(), (t.primary_key.clone().unwrap_or_default(), t.column_set()))).collect();
    for t in &mut tables {
        for fk in &mut t.foreign_keys {
            let Some(frags) = fragments_of.get(&fk.referenced_table) else { continue };
            if frags.len() < 2 {
                continue;
            }
            let wanted: AttributeSet = fk.referenced_columns.iter().cloned().collect();
            let by_key = frags.iter().find(|f| {
                let (pk, _) = &shapes[*f];
                pk.iter().cloned().collect::<AttributeSet>() == wanted
            });
            let by_columns = || frags.iter().find(|f| wanted.is_subset(&shapes[*f].1));
            if let Some(target) = by_key.or_else(by_columns) {
                fk.referenced_table = target.clone();
            }
        }
        let own = t.name.clone();
        t.foreign_keys.retain(|fk| !(fk.referenced_table == own && fk.columns == fk.referenced_columns));
    }

    Schema { name: schema.name.clone(), tables, fds }.canonicalize().map_err(NormalizeError::Structural)
}
