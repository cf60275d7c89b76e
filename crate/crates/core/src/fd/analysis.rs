//! Per-table dependency analysis over the closure lattice of the table's
//! columns.
//!
//! The closure of every column subset is computed once (at most 2^16
//! subsets), after which keys, prime attributes, projected dependencies and
//! 2NF/3NF violations are read off the table.

use crate::ident::Ident;
use crate::schema::{key_dependency, AttributeSet, FunctionalDependency, Table};

use super::bits::{Bits, Compiled};
use super::{DependencyViolation, FdError, ViolationKind, MAX_TABLE_ATTRIBUTES};

#[derive(Debug, Clone)]
pub struct TableAnalysis {
    table: Ident,
    columns: Vec<Ident>,
    full: u32,
    closures: Vec<u32>,
    keys: Vec<u32>,
    prime: u32,
}

impl TableAnalysis {
    /// Analyses `table` under `fds` plus the implicit dependency of its
    /// declared primary key.
    pub fn new(table: &Table, fds: &[FunctionalDependency]) -> Result<Self, FdError> {
        let mut all = fds.to_vec();
        if let Some(fd) = key_dependency(table) {
            all.push(fd);
        }
        let columns: Vec<Ident> = table.column_names().cloned().collect();
        Self::for_columns(table.name.clone(), &columns, &all)
    }

    /// Analyses a bare column list (no declared key) under `fds`.
    pub fn for_columns(name: Ident, columns: &[Ident], fds: &[FunctionalDependency]) -> Result<Self, FdError> {
        let mut uniq: Vec<Ident> = Vec::with_capacity(columns.len());
        for c in columns {
            if !uniq.contains(c) {
                uniq.push(c.clone());
            }
        }
        let n = uniq.len();
        if n > MAX_TABLE_ATTRIBUTES {
            return Err(FdError::AttributeLimitExceeded {
                scope: name.to_string(),
                count: n,
                limit: MAX_TABLE_ATTRIBUTES,
            });
        }
        let compiled = Compiled::new(&uniq, fds)?;
        let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let local = Bits::from_low_u32(full);
        let closures: Vec<u32> =
            (0..=full).map(|m| compiled.closure(Bits::from_low_u32(m)).intersect(local).low_u32()).collect();

        // Attributes that never appear on a right-hand side belong to every key.
        let must = full & !compiled.rhs_union().low_u32();
        let mut keys: Vec<u32> = Vec::new();
        let free = full & !must;
        let mut candidates: Vec<u32> = submasks(free).map(|m| m | must).collect();
        candidates.sort_by_key(|m| m.count_ones());
        for m in candidates {
            if closures[m as usize] == full && !keys.iter().any(|k| k & m == *k) {
                keys.push(m);
            }
        }
        let mut analysis = TableAnalysis { table: name, columns: uniq, full, closures, keys, prime: 0 };
        analysis.prime = analysis.keys.iter().fold(0, |acc, k| acc | k);
        let mut keyed: Vec<(u32, AttributeSet)> = analysis.keys.iter().map(|k| (*k, analysis.set(*k))).collect();
        keyed.sort_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| a.1.cmp(&b.1)));
        analysis.keys = keyed.into_iter().map(|(k, _)| k).collect();
        Ok(analysis)
    }

    pub fn table(&self) -> &Ident {
        &self.table
    }

    pub fn columns(&self) -> &[Ident] {
        &self.columns
    }

    pub(crate) fn mask(&self, set: &AttributeSet) -> Result<u32, FdError> {
        let mut m = 0;
        for a in set {
            let i = self.columns.iter().position(|c| c == a).ok_or_else(|| FdError::AttributeOutsideTable {
                table: self.table.to_string(),
                attribute: a.to_string(),
            })?;
            m |= 1 << i;
        }
        Ok(m)
    }

    pub(crate) fn set(&self, mask: u32) -> AttributeSet {
        (0..self.columns.len()).filter(|i| mask & (1 << i) != 0).map(|i| self.columns[i].clone()).collect()
    }

    /// Columns of `mask` in table order.
    pub(crate) fn ordered(&self, mask: u32) -> Vec<Ident> {
        (0..self.columns.len()).filter(|i| mask & (1 << i) != 0).map(|i| self.columns[i].clone()).collect()
    }

    pub(crate) fn closure_mask(&self, mask: u32) -> u32 {
        self.closures[mask as usize]
    }

    /// Closure of `x` restricted to the table's columns.
    pub fn closure(&self, x: &AttributeSet) -> Result<AttributeSet, FdError> {
        Ok(self.set(self.closure_mask(self.mask(x)?)))
    }

    pub fn is_superkey(&self, x: &AttributeSet) -> Result<bool, FdError> {
        Ok(self.closure_mask(self.mask(x)?) == self.full)
    }

    /// Minimal superkeys sorted by (size, lexicographic).
    pub fn candidate_keys(&self) -> Vec<AttributeSet> {
        self.keys.iter().map(|k| self.set(*k)).collect()
    }

    pub fn prime_attributes(&self) -> AttributeSet {
        self.set(self.prime)
    }

    /// Every nontrivial `X -> A` over the table's columns whose determinant
    /// is minimal for `A`.
    pub(crate) fn minimal_dependency_masks(&self) -> Vec<(u32, usize)> {
        let n = self.columns.len();
        let mut out = Vec::new();
        for x in 0..=self.full {
            let derived = self.closures[x as usize] & !x;
            if derived == 0 {
                continue;
            }
            for a in 0..n {
                if derived & (1 << a) == 0 {
                    continue;
                }
                let minimal = (0..n).filter(|b| x & (1 << b) != 0).all(|b| {
                    let smaller = x & !(1 << b);
                    self.closures[smaller as usize] & (1 << a) == 0
                });
                if minimal {
                    out.push((x, a));
                }
            }
        }
        out
    }

    /// Every nontrivial projected dependency with a minimal determinant.
    pub fn minimal_dependencies(&self) -> Vec<FunctionalDependency> {
        self.minimal_dependency_masks()
            .into_iter()
            .map(|(x, a)| FunctionalDependency {
                lhs: self.set(x),
                rhs: std::iter::once(self.columns[a].clone()).collect(),
                scope: None,
            })
            .collect()
    }

    /// Non-prime attributes determined by a proper subset of a candidate key.
    pub fn partial_dependencies(&self) -> Vec<DependencyViolation> {
        let mut found: Vec<(u32, usize, u32)> = Vec::new();
        for &key in &self.keys {
            if key.count_ones() < 2 {
                continue;
            }
            for s in submasks(key).filter(|s| *s != 0 && *s != key) {
                let derived = self.closures[s as usize] & !s & !self.prime;
                for a in bits_of(derived) {
                    if !found.iter().any(|(fs, fa, _)| *fs == s && *fa == a) {
                        found.push((s, a, key));
                    }
                }
            }
        }
        // Keep only minimal determinants for each dependent attribute.
        let minimal: Vec<(u32, usize, u32)> = found
            .iter()
            .filter(|(s, a, _)| !found.iter().any(|(t, b, _)| b == a && t != s && t & s == *t))
            .copied()
            .collect();
        let mut out: Vec<DependencyViolation> = minimal
            .into_iter()
            .map(|(s, a, key)| DependencyViolation {
                kind: ViolationKind::Partial,
                table: self.table.clone(),
                determinant: self.set(s),
                dependent: self.columns[a].clone(),
                witness_key: self.set(key),
            })
            .collect();
        out.sort_by(|a, b| (&a.determinant, &a.dependent).cmp(&(&b.determinant, &b.dependent)));
        out
    }

    /// Non-prime attributes determined by a non-superkey that is not itself a
    /// proper subset of a candidate key (those are partial dependencies).
    pub fn transitive_dependencies(&self) -> Vec<DependencyViolation> {
        let witness = self.keys.first().copied().unwrap_or(self.full);
        let mut out: Vec<DependencyViolation> = self
            .minimal_dependency_masks()
            .into_iter()
            .filter(|&(x, a)| {
                self.prime & (1 << a) == 0
                    && self.closures[x as usize] != self.full
                    && !self.keys.iter().any(|k| x & k == x && x != *k)
            })
            .map(|(x, a)| DependencyViolation {
                kind: ViolationKind::Transitive,
                table: self.table.clone(),
                determinant: self.set(x),
                dependent: self.columns[a].clone(),
                witness_key: self.set(witness),
            })
            .collect();
        out.sort_by(|a, b| (&a.determinant, &a.dependent).cmp(&(&b.determinant, &b.dependent)));
        out
    }
}

/// All submasks of `mask`, including 0 and `mask` itself.
pub(crate) fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

pub(crate) fn bits_of(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}
