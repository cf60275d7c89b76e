use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fd::MAX_TABLE_ATTRIBUTES;
use crate::ident::Ident;
use crate::schema::{Column, DataType, FunctionalDependency, NormalForm, Schema, Table};
use crate::verify::{repeating_group_base, verify_deterministic, AnomalyKind};

use super::datasets::{synthetic_table, SYNTHETIC_TABLE_NAME};

const WORDS: [&str; 24] = [
    "region",
    "tier",
    "segment",
    "zone",
    "channel",
    "sector",
    "cluster",
    "band",
    "district",
    "division",
    "market",
    "grade",
    "bracket",
    "circuit",
    "quarter",
    "ward",
    "territory",
    "branch",
    "unit",
    "pool",
    "lane",
    "stage",
    "route",
    "fleet",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnomalyRecord {
    pub id: u32,
    pub normal_form: NormalForm,
    pub kind: AnomalyKind,
    pub table: Ident,
    pub columns: Vec<Ident>,
    pub injected_fds: Vec<FunctionalDependency>,
    pub note: String,
}

impl AnomalyRecord {
    /// Attributes the anomaly added, with repeating-group members given by
    /// their base name.
    pub fn introduced_attributes(&self) -> Vec<Ident> {
        match self.kind {
            AnomalyKind::RepeatingGroup => self
                .columns
                .first()
                .and_then(|c| repeating_group_base(c.as_str()))
                .map(|b| vec![Ident::new(b)])
                .unwrap_or_default(),
            AnomalyKind::MissingPk => Vec::new(),
            _ => self.columns.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub base_schema: Schema,
    pub mutated_schema: Schema,
    pub normal_form: NormalForm,
    pub records: Vec<AnomalyRecord>,
    pub seed: u64,
}

impl GroundTruth {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ground truth serializes")
    }
}

#[derive(Debug, Error)]
pub enum InjectError {
    #[error("anomaly count must be at least 1")]
    InvalidCount,
    #[error("base schema is not in 3NF: {0}")]
    BaseNotClean(String),
    #[error("cannot inject a {kind} anomaly: {reason}")]
    InjectionImpossible { kind: AnomalyKind, reason: String },
}

fn impossible(kind: AnomalyKind, reason: impl Into<String>) -> InjectError {
    InjectError::InjectionImpossible { kind, reason: reason.into() }
}

struct Injector {
    schema: Schema,
    rng: ChaCha8Rng,
    touched: BTreeSet<(Ident, Ident)>,
    keyless: BTreeSet<Ident>,
    nf3_hosts: BTreeMap<Ident, usize>,
}

impl Injector {
    fn room(&self, table: &Table, extra: usize) -> bool {
        table.columns.len() + extra <= MAX_TABLE_ATTRIBUTES
    }

    fn is_free(&self, name: &str) -> bool {
        self.schema.tables.iter().all(|t| !t.has_column(name))
    }

    fn fd_attributes(&self) -> BTreeSet<Ident> {
        self.schema.fds.iter().flat_map(|fd| fd.attributes().to_vec()).collect()
    }

    /// A word for which every name in `forms(word)` is unused.
    fn fresh_word(&mut self, forms: impl Fn(&str) -> Vec<String>) -> Option<Vec<String>> {
        let mut words: Vec<String> = WORDS.iter().map(|w| w.to_string()).collect();
        words.shuffle(&mut self.rng);
        let mut pairs: Vec<String> =
            WORDS.iter().flat_map(|a| WORDS.iter().filter(move |b| a != *b).map(move |b| format!("{a}_{b}"))).collect();
        pairs.shuffle(&mut self.rng);
        words.into_iter().chain(pairs).map(|w| forms(&w)).find(|names| names.iter().all(|n| self.is_free(n)))
    }

    fn ensure_synthetic(&mut self) -> bool {
        if self.schema.table(SYNTHETIC_TABLE_NAME).is_some() {
            return false;
        }
        match synthetic_table(&self.schema) {
            Some(t) => {
                self.schema.tables.push(t);
                true
            }
            None => false,
        }
    }

    fn table_mut(&mut self, name: &Ident) -> &mut Table {
        self.schema.table_mut(name.as_str()).expect("injection site exists")
    }

    fn partial(&mut self, id: u32) -> Result<AnomalyRecord, InjectError> {
        let kind = AnomalyKind::Partial;
        let hosts = |s: &Self| -> Vec<Ident> {
            s.schema
                .tables
                .iter()
                .filter(|t| t.primary_key.as_ref().is_some_and(|k| k.len() >= 2) && s.room(t, 1))
                .map(|t| t.name.clone())
                .collect()
        };
        let mut candidates = hosts(self);
        if candidates.is_empty() && self.ensure_synthetic() {
            candidates = hosts(self);
        }
        let host = candidates
            .choose(&mut self.rng)
            .cloned()
            .ok_or_else(|| impossible(kind, "no table with a composite key has room for another column"))?;
        let key = self.schema.table(host.as_str()).and_then(|t| t.primary_key.clone()).unwrap_or_default();
        let part = key.choose(&mut self.rng).cloned().expect("composite key");
        let stem = part.as_str().strip_suffix("_id").unwrap_or(part.as_str()).to_string();
        let names =
            self.fresh_word(|w| vec![format!("{stem}_{w}")]).ok_or_else(|| impossible(kind, "no fresh column name"))?;
        let dependent = Ident::new(names[0].clone());
        self.table_mut(&host).columns.push(Column::new(dependent.clone(), DataType::Varchar(40)));
        let fd = FunctionalDependency::new([part.clone()], [dependent.clone()]).scoped(host.clone());
        self.schema.fds.push(fd.clone());
        let key_list: Vec<&str> = key.iter().map(Ident::as_str).collect();
        Ok(AnomalyRecord {
            id,
            normal_form: NormalForm::Nf2,
            kind,
            note: format!("{dependent} depends on {part} alone, part of the key ({})", key_list.join(", ")),
            table: host,
            columns: vec![dependent],
            injected_fds: vec![fd],
        })
    }

    fn transitive(&mut self, id: u32) -> Result<AnomalyRecord, InjectError> {
        let kind = AnomalyKind::Transitive;
        let eligible: Vec<Ident> = self
            .schema
            .tables
            .iter()
            .filter(|t| t.primary_key.is_some() && self.room(t, 2))
            .map(|t| t.name.clone())
            .collect();
        let fewest = eligible.iter().map(|t| self.nf3_hosts.get(t).copied().unwrap_or(0)).min();
        let least_used: Vec<Ident> = eligible
            .into_iter()
            .filter(|t| self.nf3_hosts.get(t).copied().unwrap_or(0) == fewest.unwrap_or(0))
            .collect();
        let host = least_used
            .choose(&mut self.rng)
            .cloned()
            .ok_or_else(|| impossible(kind, "no keyed table has room for two more columns"))?;
        let names = self
            .fresh_word(|w| vec![format!("{w}_code"), format!("{w}_name")])
            .ok_or_else(|| impossible(kind, "no fresh column name"))?;
        let (a, b) = (Ident::new(names[0].clone()), Ident::new(names[1].clone()));
        let table = self.table_mut(&host);
        table.columns.push(Column::new(a.clone(), DataType::Varchar(10)));
        table.columns.push(Column::new(b.clone(), DataType::Varchar(60)));
        let fd = FunctionalDependency::new([a.clone()], [b.clone()]).scoped(host.clone());
        self.schema.fds.push(fd.clone());
        *self.nf3_hosts.entry(host.clone()).or_default() += 1;
        Ok(AnomalyRecord {
            id,
            normal_form: NormalForm::Nf3,
            kind,
            note: format!("{b} depends on {a}, which depends on the key of {host}"),
            table: host,
            columns: vec![a, b],
            injected_fds: vec![fd],
        })
    }

    fn plain_column(&self, table: &Table, col: &Column, fd_attrs: &BTreeSet<Ident>) -> bool {
        let in_key = table.primary_key.as_ref().is_some_and(|k| k.contains(&col.name));
        let in_fk = table.foreign_keys.iter().any(|fk| fk.columns.contains(&col.name));
        let referenced = self.schema.tables.iter().any(|t| {
            t.foreign_keys
                .iter()
                .any(|fk| fk.referenced_table == table.name && fk.referenced_columns.contains(&col.name))
        });
        !in_key
            && !in_fk
            && !referenced
            && !col.is_multivalued()
            && !fd_attrs.contains(&col.name)
            && !col.name.as_str().ends_with(|c: char| c.is_ascii_digit())
            && !self.touched.contains(&(table.name.clone(), col.name.clone()))
    }

    fn non_atomic(&mut self, id: u32) -> Result<AnomalyRecord, InjectError> {
        let kind = AnomalyKind::NonAtomic;
        let fd_attrs = self.fd_attributes();
        let mut candidates: Vec<(Ident, Ident, Ident)> = Vec::new();
        for child in &self.schema.tables {
            for fk in &child.foreign_keys {
                let Some(parent) = self.schema.table(fk.referenced_table.as_str()) else { continue };
                if parent.name == child.name || parent.primary_key.is_none() || !self.room(parent, 1) {
                    continue;
                }
                for col in child.columns.iter().filter(|c| self.plain_column(child, c, &fd_attrs)) {
                    let folded = Ident::new(format!("{}_list", col.name));
                    if self.is_free(folded.as_str())
                        && !candidates.iter().any(|c| c.0 == parent.name && c.2 == col.name)
                    {
                        candidates.push((parent.name.clone(), child.name.clone(), col.name.clone()));
                    }
                }
            }
        }
        let (table, column, note) = match candidates.choose(&mut self.rng).cloned() {
            Some((parent, child, col)) => {
                self.touched.insert((child.clone(), col.clone()));
                let folded = Ident::new(format!("{col}_list"));
                let note = format!("{child}.{col} folded into {parent}.{folded} as a delimited list");
                (parent, folded, note)
            }
            None => {
                let keyed: Vec<Ident> = self
                    .schema
                    .tables
                    .iter()
                    .filter(|t| t.primary_key.is_some() && self.room(t, 1))
                    .map(|t| t.name.clone())
                    .collect();
                let host = keyed
                    .choose(&mut self.rng)
                    .cloned()
                    .ok_or_else(|| impossible(kind, "no keyed table has room for another column"))?;
                let names = self
                    .fresh_word(|w| vec![format!("{w}_list")])
                    .ok_or_else(|| impossible(kind, "no fresh column name"))?;
                let folded = Ident::new(names[0].clone());
                let note = format!("{host}.{folded} holds a delimited list");
                (host, folded, note)
            }
        };
        self.table_mut(&table).columns.push(Column::new(column.clone(), DataType::Text).multivalued());
        Ok(AnomalyRecord {
            id,
            normal_form: NormalForm::Nf1,
            kind,
            table,
            columns: vec![column],
            injected_fds: Vec::new(),
            note,
        })
    }

    fn repeating_group(&mut self, id: u32) -> Result<AnomalyRecord, InjectError> {
        let kind = AnomalyKind::RepeatingGroup;
        let fd_attrs = self.fd_attributes();
        let mut candidates: Vec<(Ident, Ident)> = Vec::new();
        for table in self.schema.tables.iter().filter(|t| self.room(t, 2)) {
            for col in table.columns.iter().filter(|c| self.plain_column(table, c, &fd_attrs)) {
                if (1..=3).all(|i| self.is_free(&format!("{}{i}", col.name))) {
                    candidates.push((table.name.clone(), col.name.clone()));
                }
            }
        }
        let (host, base) = candidates
            .choose(&mut self.rng)
            .cloned()
            .ok_or_else(|| impossible(kind, "no plain column left to repeat"))?;
        let table = self.table_mut(&host);
        let pos = table.columns.iter().position(|c| c.name == base).expect("column exists");
        let original = table.columns.remove(pos);
        let members: Vec<Ident> = (1..=3).map(|i| Ident::new(format!("{base}{i}"))).collect();
        for (offset, name) in members.iter().enumerate() {
            let mut col = original.clone();
            col.name = name.clone();
            col.nullable = offset > 0 || original.nullable;
            table.columns.insert(pos + offset, col);
        }
        self.touched.insert((host.clone(), base.clone()));
        let list: Vec<&str> = members.iter().map(Ident::as_str).collect();
        Ok(AnomalyRecord {
            id,
            normal_form: NormalForm::Nf1,
            kind,
            note: format!("{host}.{base} repeated as {}", list.join(", ")),
            table: host,
            columns: members,
            injected_fds: Vec::new(),
        })
    }

    fn missing_pk(&mut self, id: u32) -> Result<AnomalyRecord, InjectError> {
        let kind = AnomalyKind::MissingPk;
        let candidates: Vec<Ident> = self
            .schema
            .tables
            .iter()
            .filter(|t| t.primary_key.is_some() && !self.keyless.contains(&t.name))
            .map(|t| t.name.clone())
            .collect();
        let host =
            candidates.choose(&mut self.rng).cloned().ok_or_else(|| impossible(kind, "no table with a key left"))?;
        let table = self.table_mut(&host);
        let key = table.primary_key.take().expect("keyed table");
        let rest: Vec<Ident> = table.columns.iter().map(|c| c.name.clone()).filter(|c| !key.contains(c)).collect();
        let columns: Vec<Ident> = key.iter().cloned().chain(rest.iter().cloned()).collect();
        let mut injected_fds = Vec::new();
        if !rest.is_empty() {
            let fd = FunctionalDependency::new(key.clone(), rest).scoped(host.clone());
            self.schema.fds.push(fd.clone());
            injected_fds.push(fd);
        }
        self.keyless.insert(host.clone());
        let key_list: Vec<&str> = key.iter().map(Ident::as_str).collect();
        Ok(AnomalyRecord {
            id,
            normal_form: NormalForm::Nf1,
            kind,
            note: format!("primary key ({}) of {host} dropped", key_list.join(", ")),
            table: host,
            columns,
            injected_fds,
        })
    }
}

const NF1_ROTATION: [AnomalyKind; 3] = [AnomalyKind::NonAtomic, AnomalyKind::RepeatingGroup, AnomalyKind::MissingPk];

/// Plants `count` anomalies of normal form `nf` in `base`. The result is a
/// pure function of the arguments.
pub fn inject_anomalies(base: &Schema, nf: NormalForm, count: usize, seed: u64) -> Result<GroundTruth, InjectError> {
    if count == 0 {
        return Err(InjectError::InvalidCount);
    }
    let report = verify_deterministic(base, NormalForm::Nf3).map_err(|e| InjectError::BaseNotClean(e.to_string()))?;
    if !report.passes(NormalForm::Nf3) {
        let first = report.anomalies.first().map(|a| a.explanation.clone()).unwrap_or_default();
        return Err(InjectError::BaseNotClean(first));
    }

    let mut inj = Injector {
        schema: base.clone(),
        rng: ChaCha8Rng::seed_from_u64(seed),
        touched: BTreeSet::new(),
        keyless: BTreeSet::new(),
        nf3_hosts: BTreeMap::new(),
    };
    let mut records = Vec::with_capacity(count);
    match nf {
        NormalForm::Nf1 => {
            let offset = inj.rng.random_range(0..NF1_ROTATION.len());
            let plan: Vec<AnomalyKind> = (0..count).map(|i| NF1_ROTATION[(offset + i) % NF1_ROTATION.len()]).collect();
            // Renames first and key removal last, so recorded columns stay valid.
            for kind in [AnomalyKind::RepeatingGroup, AnomalyKind::NonAtomic, AnomalyKind::MissingPk] {
                for (i, _) in plan.iter().enumerate().filter(|(_, k)| **k == kind) {
                    let id = i as u32 + 1;
                    records.push(match kind {
                        AnomalyKind::RepeatingGroup => inj.repeating_group(id)?,
                        AnomalyKind::NonAtomic => inj.non_atomic(id)?,
                        _ => inj.missing_pk(id)?,
                    });
                }
            }
            records.sort_by_key(|r| r.id);
        }
        NormalForm::Nf2 => {
            for i in 0..count {
                records.push(inj.partial(i as u32 + 1)?);
            }
        }
        NormalForm::Nf3 => {
            if inj.schema.tables.len() < count {
                inj.ensure_synthetic();
            }
            for i in 0..count {
                records.push(inj.transitive(i as u32 + 1)?);
            }
        }
    }
    let mutated = inj.schema.canonicalize().map_err(|e| impossible(AnomalyKind::default_for(nf), format!("{e:?}")))?;
    Ok(GroundTruth { base_schema: base.clone(), mutated_schema: mutated, normal_form: nf, records, seed })
}
