use crate::fd::{DependencyViolation, FdError, TableAnalysis, ViolationKind};
use crate::ident::Ident;
use crate::schema::{DataType, NormalForm, Schema, Table};

use super::{AnomalyItem, AnomalyKind};

/// Splits a repeating-group member name into its base: `phone2` and
/// `phone_2` both give `phone`. The index is a single digit 1 to 9 not
/// preceded by another digit.
pub fn repeating_group_base(name: &str) -> Option<&str> {
    let bytes = name.as_bytes();
    let n = bytes.len();
    if n < 2 || !(b'1'..=b'9').contains(&bytes[n - 1]) || bytes[n - 2].is_ascii_digit() {
        return None;
    }
    let base = &name[..n - 1];
    let base = base.strip_suffix('_').unwrap_or(base);
    (!base.is_empty()).then_some(base)
}

fn list(cols: &[Ident]) -> String {
    cols.iter().map(Ident::as_str).collect::<Vec<_>>().join(", ")
}

fn key_columns(table: &Table, schema: &Schema) -> Vec<Ident> {
    let fds = schema.fds_for_table(table);
    match TableAnalysis::new(table, &fds) {
        Ok(a) => a
            .candidate_keys()
            .first()
            .map(|k| table.column_names().filter(|c| k.contains(c)).cloned().collect())
            .unwrap_or_default(),
        Err(_) => table.column_names().cloned().collect(),
    }
}

/// Atomicity, repeating groups and declared keys.
pub fn check_1nf(schema: &Schema) -> Vec<AnomalyItem> {
    let mut out = Vec::new();
    for table in &schema.tables {
        let parent_key = table.primary_key.as_ref().map(|k| list(k));
        for col in table.columns.iter().filter(|c| c.is_multivalued()) {
            let keyed_by = match &parent_key {
                Some(k) => format!("({k}, {})", col.name),
                None => format!("the parent key and {}", col.name),
            };
            out.push(AnomalyItem {
                normal_form: NormalForm::Nf1,
                kind: AnomalyKind::NonAtomic,
                table: table.name.clone(),
                columns: vec![col.name.clone()],
                explanation: format!("column {} holds several values in one field", col.name),
                suggested_action: format!("move {} into a child table keyed by {keyed_by}", col.name),
            });
        }

        let mut groups: Vec<(String, &DataType, Vec<Ident>)> = Vec::new();
        for col in &table.columns {
            let Some(base) = repeating_group_base(col.name.as_str()) else { continue };
            let base = base.to_ascii_lowercase();
            match groups.iter_mut().find(|(b, t, _)| *b == base && **t == col.data_type) {
                Some((_, _, members)) => members.push(col.name.clone()),
                None => groups.push((base, &col.data_type, vec![col.name.clone()])),
            }
        }
        for (base, _, members) in groups.into_iter().filter(|g| g.2.len() >= 2) {
            out.push(AnomalyItem {
                normal_form: NormalForm::Nf1,
                kind: AnomalyKind::RepeatingGroup,
                table: table.name.clone(),
                explanation: format!("columns {} repeat the attribute {base}", list(&members)),
                suggested_action: format!("replace {} with a child table holding one {base} per row", list(&members)),
                columns: members,
            });
        }

        if table.primary_key.is_none() {
            let key = key_columns(table, schema);
            out.push(AnomalyItem {
                normal_form: NormalForm::Nf1,
                kind: AnomalyKind::MissingPk,
                table: table.name.clone(),
                explanation: format!("table {} declares no primary key", table.name),
                suggested_action: format!("declare PRIMARY KEY ({})", list(&key)),
                columns: key,
            });
        }
    }
    out
}

fn violation_item(v: &DependencyViolation) -> AnomalyItem {
    let det = v.determinant.to_vec();
    let mut columns = det.clone();
    columns.push(v.dependent.clone());
    let split = format!("split {} into a table keyed by {}", list(&columns), list(&det));
    match v.kind {
        ViolationKind::Partial => AnomalyItem {
            normal_form: NormalForm::Nf2,
            kind: AnomalyKind::Partial,
            table: v.table.clone(),
            explanation: format!(
                "{} depends on {}, a proper subset of the candidate key ({})",
                v.dependent,
                list(&det),
                v.witness_key.joined()
            ),
            suggested_action: split,
            columns,
        },
        ViolationKind::Transitive => AnomalyItem {
            normal_form: NormalForm::Nf3,
            kind: AnomalyKind::Transitive,
            table: v.table.clone(),
            explanation: format!("{} depends on {}, which is not a key of {}", v.dependent, list(&det), v.table),
            suggested_action: split,
            columns,
        },
    }
}

pub(crate) fn dependency_items(schema: &Schema, partial: bool, transitive: bool) -> Result<Vec<AnomalyItem>, FdError> {
    let mut out = Vec::new();
    for table in &schema.tables {
        let analysis = TableAnalysis::new(table, &schema.fds_for_table(table))?;
        if partial {
            out.extend(analysis.partial_dependencies().iter().map(violation_item));
        }
        if transitive {
            out.extend(analysis.transitive_dependencies().iter().map(violation_item));
        }
    }
    Ok(out)
}

/// Partial dependencies of non-prime attributes on proper subsets of a
/// candidate key.
pub fn check_2nf(schema: &Schema) -> Result<Vec<AnomalyItem>, FdError> {
    dependency_items(schema, true, false)
}

/// Non-prime attributes determined by a set that is neither a superkey nor
/// part of a candidate key.
pub fn check_3nf(schema: &Schema) -> Result<Vec<AnomalyItem>, FdError> {
    dependency_items(schema, false, true)
}
