//! Bernstein 3NF synthesis for a single table.

use std::collections::BTreeMap;

use crate::ident::Ident;
use crate::schema::{AttributeSet, ForeignKey, FunctionalDependency, Table};

use super::{minimal_cover, FdError, TableAnalysis};

/// Decomposes `table` into 3NF tables.
///
/// A table with no partial or transitive violation is returned unchanged,
/// keyed by its declared primary key when that is a candidate key and by the
/// first candidate key otherwise. Otherwise the minimal cover of the
/// projected dependencies is grouped by determinant, one table per group
/// keyed by the determinant; tables whose columns are contained in another
/// are dropped, and a key table is appended when no output contains a
/// candidate key. The output holding a candidate key keeps the source name.
/// Foreign keys of the source are copied onto every output that holds their
/// columns, and outputs gain foreign keys to the outputs keyed by a subset
/// of their columns.
pub fn synthesize_3nf(table: &Table, fds: &[FunctionalDependency]) -> Result<Vec<Table>, FdError> {
    let analysis = TableAnalysis::new(table, fds)?;
    let keys = analysis.candidate_keys();
    let declared_is_key =
        table.primary_key.as_ref().map(|pk| keys.contains(&pk.iter().cloned().collect())).unwrap_or(false);

    if analysis.partial_dependencies().is_empty() && analysis.transitive_dependencies().is_empty() {
        let mut out = table.clone();
        if !declared_is_key {
            out.primary_key = keys.first().map(|k| analysis.ordered(analysis.mask(k).unwrap_or(0)));
        }
        return Ok(vec![out]);
    }

    let cover = minimal_cover(&analysis.minimal_dependencies());
    let mut groups: BTreeMap<AttributeSet, AttributeSet> = BTreeMap::new();
    let mut order: Vec<AttributeSet> = Vec::new();
    for fd in &cover {
        let entry = groups.entry(fd.lhs.clone()).or_insert_with(|| {
            order.push(fd.lhs.clone());
            fd.lhs.clone()
        });
        *entry = entry.union(&fd.rhs);
    }
    let mut fragments: Vec<(AttributeSet, AttributeSet)> = order
        .into_iter()
        .map(|lhs| {
            let cols = groups[&lhs].clone();
            (lhs, cols)
        })
        .collect();

    // Drop fragments contained in another; of two equal ones keep the first.
    let mut kept: Vec<(AttributeSet, AttributeSet)> = Vec::new();
    for (i, (lhs, cols)) in fragments.iter().enumerate() {
        let subsumed = fragments
            .iter()
            .enumerate()
            .any(|(j, (_, other))| j != i && cols.is_subset(other) && (cols != other || j < i));
        if !subsumed {
            kept.push((lhs.clone(), cols.clone()));
        }
    }
    fragments = kept;

    let holds_key = |cols: &AttributeSet| keys.iter().any(|k| k.is_subset(cols));
    let mut primary_fragment = fragments.iter().position(|(_, cols)| holds_key(cols));
    if primary_fragment.is_none() {
        if let Some(k) = keys.first() {
            fragments.push((k.clone(), k.clone()));
            primary_fragment = Some(fragments.len() - 1);
        }
    }

    if let Some(p) = primary_fragment {
        let first = fragments.remove(p);
        fragments.insert(0, first);
        primary_fragment = Some(0);
    }

    let declared: Option<AttributeSet> = table.primary_key.as_ref().map(|pk| pk.iter().cloned().collect());
    let mut used_names: Vec<Ident> = vec![table.name.clone()];
    let mut out: Vec<Table> = Vec::with_capacity(fragments.len());
    for (i, (lhs, cols)) in fragments.iter().enumerate() {
        let columns = table.columns.iter().filter(|c| cols.contains(&c.name)).cloned().collect();
        let (name, key) = if Some(i) == primary_fragment {
            let key = match &declared {
                Some(pk) if declared_is_key && pk.is_subset(cols) => pk.clone(),
                _ => lhs.clone(),
            };
            (table.name.clone(), key)
        } else {
            let name = fresh_name(&table.name, lhs, &used_names);
            used_names.push(name.clone());
            (name, lhs.clone())
        };
        let key_order: Vec<Ident> = match (&table.primary_key, declared_is_key) {
            (Some(pk), true) if key == pk.iter().cloned().collect() => pk.clone(),
            _ => analysis.ordered(analysis.mask(&key)?),
        };
        out.push(Table { name, columns, primary_key: Some(key_order), foreign_keys: Vec::new() });
    }

    link_fragments(&mut out, table);
    Ok(out)
}

fn fresh_name(source: &Ident, lhs: &AttributeSet, used: &[Ident]) -> Ident {
    let base = if lhs.len() == 1 {
        let only = lhs.iter().next().map(Ident::as_str).unwrap_or("part");
        let lower = only.to_ascii_lowercase();
        if lower.len() > 3 && lower.ends_with("_id") {
            only[..only.len() - 3].to_string()
        } else {
            only.to_string()
        }
    } else {
        lhs.iter().map(Ident::as_str).collect::<Vec<_>>().join("_")
    };
    let candidate = Ident::new(format!("{source}_{base}"));
    if !used.contains(&candidate) {
        return candidate;
    }
    (2..)
        .map(|n| Ident::new(format!("{source}_{base}_x{n}")))
        .find(|c| !used.contains(c))
        .expect("unbounded name search")
}

fn link_fragments(out: &mut [Table], source: &Table) {
    let shapes: Vec<(Ident, Vec<Ident>, AttributeSet, AttributeSet)> = out
        .iter()
        .map(|t| {
            let pk = t.primary_key.clone().unwrap_or_default();
            let pk_set: AttributeSet = pk.iter().cloned().collect();
            (t.name.clone(), pk, pk_set, t.column_set())
        })
        .collect();
    for t in out.iter_mut() {
        let cols = t.column_set();
        let own: AttributeSet = t.primary_key.iter().flatten().cloned().collect();
        for fk in &source.foreign_keys {
            if fk.columns.iter().all(|c| cols.contains(c)) {
                t.foreign_keys.push(fk.clone());
            }
        }
        for (name, pk, pk_set, other_cols) in &shapes {
            if *name == t.name || pk.is_empty() || *pk_set == own {
                continue;
            }
            // Two fragments holding each other's keys are not linked.
            let mutual = own.is_subset(other_cols);
            if pk_set.is_subset(&cols) && !mutual {
                t.foreign_keys.push(ForeignKey {
                    columns: pk.clone(),
                    referenced_table: name.clone(),
                    referenced_columns: pk.clone(),
                });
            }
        }
    }
}
