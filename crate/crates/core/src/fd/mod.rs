//! Functional-dependency theory: closures, keys, covers, projections,
//! 2NF/3NF violation detection, 3NF synthesis and the chase.
//!
//! Functions that take a [`Table`] also apply the implicit dependency of its
//! declared primary key. Dependencies may mention attributes outside the
//! table; they take part in closures but never appear in results.

mod analysis;
mod bits;
mod synth;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ident::Ident;
use crate::schema::{AttributeSet, FunctionalDependency, Table};

pub use analysis::TableAnalysis;
pub use bits::MAX_UNIVERSE;
pub use synth::synthesize_3nf;

use bits::{Bits, Compiled};

/// Column cap for any per-table computation.
pub const MAX_TABLE_ATTRIBUTES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FdError {
    #[error("{scope} has {count} attributes; at most {limit} are supported")]
    AttributeLimitExceeded { scope: String, count: usize, limit: usize },
    #[error("attribute \"{attribute}\" is not a column of \"{table}\"")]
    AttributeOutsideTable { table: String, attribute: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    Partial,
    Transitive,
}

/// A 2NF (partial) or 3NF (transitive) violation inside one table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyViolation {
    pub kind: ViolationKind,
    pub table: Ident,
    pub determinant: AttributeSet,
    pub dependent: Ident,
    pub witness_key: AttributeSet,
}

/// Least fixpoint of `x` under `fds`.
pub fn closure(x: &AttributeSet, fds: &[FunctionalDependency]) -> AttributeSet {
    let mut result = x.clone();
    loop {
        let mut changed = false;
        for fd in fds {
            if fd.lhs.is_subset(&result) && !fd.rhs.is_subset(&result) {
                result = result.union(&fd.rhs);
                changed = true;
            }
        }
        if !changed {
            return result;
        }
    }
}

pub fn is_superkey(x: &AttributeSet, table: &Table, fds: &[FunctionalDependency]) -> Result<bool, FdError> {
    TableAnalysis::new(table, fds)?.is_superkey(x)
}

/// All minimal superkeys, sorted by (size, lexicographic).
pub fn candidate_keys(table: &Table, fds: &[FunctionalDependency]) -> Result<Vec<AttributeSet>, FdError> {
    Ok(TableAnalysis::new(table, fds)?.candidate_keys())
}

pub fn prime_attributes(table: &Table, fds: &[FunctionalDependency]) -> Result<AttributeSet, FdError> {
    Ok(TableAnalysis::new(table, fds)?.prime_attributes())
}

pub fn partial_dependencies(table: &Table, fds: &[FunctionalDependency]) -> Result<Vec<DependencyViolation>, FdError> {
    Ok(TableAnalysis::new(table, fds)?.partial_dependencies())
}

pub fn transitive_dependencies(
    table: &Table,
    fds: &[FunctionalDependency],
) -> Result<Vec<DependencyViolation>, FdError> {
    Ok(TableAnalysis::new(table, fds)?.transitive_dependencies())
}

/// Minimal cover: singleton right-hand sides, no extraneous determinant
/// attributes, no redundant dependencies. Output is sorted and unscoped.
pub fn minimal_cover(fds: &[FunctionalDependency]) -> Vec<FunctionalDependency> {
    let compiled = match Compiled::new(&[], fds) {
        Ok(c) => c,
        // Beyond the bitset universe, fall back to the name-based routine.
        Err(_) => return minimal_cover_by_name(fds),
    };
    let mut singles: Vec<(Bits, usize)> = Vec::new();
    for (lhs, rhs) in &compiled.fds {
        for a in rhs.ones() {
            if !lhs.contains(a) {
                singles.push((*lhs, a));
            }
        }
    }
    let key = |(l, a): &(Bits, usize)| (compiled.set(*l), compiled.names[*a].clone());
    singles.sort_by_key(key);
    singles.dedup();

    let as_pairs =
        |v: &[(Bits, usize)]| -> Vec<(Bits, Bits)> { v.iter().map(|(l, a)| (*l, Bits::empty().with(*a))).collect() };

    // Extraneous determinant attributes.
    for i in 0..singles.len() {
        let (mut lhs, a) = singles[i];
        let attrs: Vec<usize> = {
            let mut v: Vec<usize> = lhs.ones().collect();
            v.sort_by_key(|b| compiled.names[*b].clone());
            v
        };
        for b in attrs {
            if lhs.ones().count() <= 1 {
                break;
            }
            let smaller = without(lhs, b);
            let current = as_pairs(&singles);
            if compiled.closure_with(smaller, &current).contains(a) {
                lhs = smaller;
                singles[i] = (lhs, a);
            }
        }
    }
    singles.sort_by_key(key);
    singles.dedup();

    // Redundant dependencies.
    let mut i = 0;
    while i < singles.len() {
        let (lhs, a) = singles[i];
        let rest: Vec<(Bits, usize)> = singles.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| *f).collect();
        if compiled.closure_with(lhs, &as_pairs(&rest)).contains(a) {
            singles.remove(i);
        } else {
            i += 1;
        }
    }
    singles
        .into_iter()
        .map(|(l, a)| FunctionalDependency {
            lhs: compiled.set(l),
            rhs: std::iter::once(compiled.names[a].clone()).collect(),
            scope: None,
        })
        .collect()
}

fn without(bits: Bits, i: usize) -> Bits {
    bits.ones().filter(|b| *b != i).fold(Bits::empty(), |acc, b| acc.with(b))
}

fn minimal_cover_by_name(fds: &[FunctionalDependency]) -> Vec<FunctionalDependency> {
    let mut singles: Vec<FunctionalDependency> = fds
        .iter()
        .flat_map(|fd| {
            fd.rhs.iter().filter(|a| !fd.lhs.contains(a)).map(|a| FunctionalDependency {
                lhs: fd.lhs.clone(),
                rhs: std::iter::once(a.clone()).collect(),
                scope: None,
            })
        })
        .collect();
    singles.sort();
    singles.dedup();
    for i in 0..singles.len() {
        for b in singles[i].lhs.to_vec() {
            if singles[i].lhs.len() <= 1 {
                break;
            }
            let smaller = singles[i].lhs.difference(&std::iter::once(b).collect());
            if singles[i].rhs.is_subset(&closure(&smaller, &singles)) {
                singles[i].lhs = smaller;
            }
        }
    }
    singles.sort();
    singles.dedup();
    let mut i = 0;
    while i < singles.len() {
        let fd = singles.remove(i);
        if fd.rhs.is_subset(&closure(&fd.lhs, &singles)) {
            continue;
        }
        singles.insert(i, fd);
        i += 1;
    }
    singles
}

/// Nontrivial dependencies `X -> A` with `X ∪ {A} ⊆ cols` implied by `fds`,
/// reduced to a minimal cover.
pub fn project_fds(fds: &[FunctionalDependency], cols: &AttributeSet) -> Result<Vec<FunctionalDependency>, FdError> {
    let columns = cols.to_vec();
    let analysis = TableAnalysis::for_columns(Ident::new("projection"), &columns, fds)?;
    Ok(minimal_cover(&analysis.minimal_dependencies()))
}

/// Chase test: `true` iff joining the projections of the universal relation
/// onto `tables` is lossless under `fds`.
pub fn chase_lossless(
    tables: &[Table],
    universe: &AttributeSet,
    fds: &[FunctionalDependency],
) -> Result<bool, FdError> {
    let cols = universe.to_vec();
    if cols.len() > MAX_TABLE_ATTRIBUTES {
        return Err(FdError::AttributeLimitExceeded {
            scope: "chase universe".into(),
            count: cols.len(),
            limit: MAX_TABLE_ATTRIBUTES,
        });
    }
    for t in tables {
        for c in t.column_names() {
            if !universe.contains(c) {
                return Err(FdError::AttributeOutsideTable { table: "universe".into(), attribute: c.to_string() });
            }
        }
    }
    let projected = project_fds(fds, universe)?;
    let col_index = |a: &Ident| cols.iter().position(|c| c == a);
    let rules: Vec<(Vec<usize>, usize)> = projected
        .iter()
        .filter_map(|fd| {
            let lhs: Option<Vec<usize>> = fd.lhs.iter().map(col_index).collect();
            let rhs = fd.rhs.iter().next().and_then(col_index)?;
            Some((lhs?, rhs))
        })
        .collect();

    // 0 is the distinguished symbol; every other cell starts unique.
    let mut next = 1u32;
    let mut rows: Vec<Vec<u32>> = tables
        .iter()
        .map(|t| {
            cols.iter()
                .map(|c| {
                    if t.has_column(c.as_str()) {
                        0
                    } else {
                        next += 1;
                        next
                    }
                })
                .collect()
        })
        .collect();

    loop {
        let mut changed = false;
        for (lhs, a) in &rules {
            for i in 0..rows.len() {
                for j in (i + 1)..rows.len() {
                    if lhs.iter().all(|&c| rows[i][c] == rows[j][c]) && rows[i][*a] != rows[j][*a] {
                        let keep = rows[i][*a].min(rows[j][*a]);
                        let drop = rows[i][*a].max(rows[j][*a]);
                        for row in rows.iter_mut() {
                            if row[*a] == drop {
                                row[*a] = keep;
                            }
                        }
                        changed = true;
                    }
                }
            }
        }
        if rows.iter().any(|r| r.iter().all(|v| *v == 0)) {
            return Ok(true);
        }
        if !changed {
            return Ok(false);
        }
    }
}

/// `true` iff every dependency of the minimal cover of `fds` (projected onto
/// the decomposition's attributes) follows from the dependencies that hold
/// inside individual tables.
pub fn preserves_dependencies(tables: &[Table], fds: &[FunctionalDependency]) -> Result<bool, FdError> {
    let universe: AttributeSet = tables.iter().flat_map(|t| t.column_names().cloned()).collect();
    if universe.len() > MAX_TABLE_ATTRIBUTES {
        return Err(FdError::AttributeLimitExceeded {
            scope: "decomposition".into(),
            count: universe.len(),
            limit: MAX_TABLE_ATTRIBUTES,
        });
    }
    let targets = project_fds(fds, &universe)?;
    let fragments: Vec<AttributeSet> = tables.iter().map(Table::column_set).collect();
    for fd in &targets {
        let mut z = fd.lhs.clone();
        loop {
            let before = z.len();
            for frag in &fragments {
                let seed = z.intersection(frag);
                let reached = closure(&seed, fds).intersection(frag);
                z = z.union(&reached);
            }
            if z.len() == before {
                break;
            }
        }
        if !fd.rhs.is_subset(&z) {
            return Ok(false);
        }
    }
    Ok(true)
}
