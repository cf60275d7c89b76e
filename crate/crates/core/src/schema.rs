//! Relational schema model: tables, columns, keys, foreign keys and
//! functional dependencies.
//!
//! Every type here is an immutable value. Structural rules are checked by
//! [`validate_schema`], which reports every violation instead of stopping at
//! the first one.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ident::Ident;

/// Normal forms up to third normal form, totally ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NormalForm {
    #[serde(rename = "NF1")]
    Nf1,
    #[serde(rename = "NF2")]
    Nf2,
    #[serde(rename = "NF3")]
    Nf3,
}

impl NormalForm {
    pub const ALL: [NormalForm; 3] = [NormalForm::Nf1, NormalForm::Nf2, NormalForm::Nf3];

    pub fn level(self) -> u8 {
        match self {
            NormalForm::Nf1 => 1,
            NormalForm::Nf2 => 2,
            NormalForm::Nf3 => 3,
        }
    }

    pub fn from_level(level: u8) -> Option<Self> {
        match level {
            1 => Some(NormalForm::Nf1),
            2 => Some(NormalForm::Nf2),
            3 => Some(NormalForm::Nf3),
            _ => None,
        }
    }

    /// All forms from 1NF up to and including `self`.
    pub fn up_to(self) -> impl Iterator<Item = NormalForm> {
        NormalForm::ALL.into_iter().filter(move |nf| *nf <= self)
    }

    pub fn tag(self) -> &'static str {
        match self {
            NormalForm::Nf1 => "NF1",
            NormalForm::Nf2 => "NF2",
            NormalForm::Nf3 => "NF3",
        }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}NF", self.level())
    }
}

impl FromStr for NormalForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_uppercase();
        let digit = t.strip_prefix("NF").or_else(|| t.strip_suffix("NF")).unwrap_or(&t);
        digit
            .parse::<u8>()
            .ok()
            .and_then(NormalForm::from_level)
            .ok_or_else(|| format!("unknown normal form `{s}` (expected 1, 2 or 3)"))
    }
}

/// Column data type. Unrecognised type names are preserved verbatim in
/// [`DataType::Other`] and treated as text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DataType {
    Int,
    BigInt,
    Decimal { precision: u32, scale: u32 },
    Varchar(u32),
    Text,
    Date,
    Timestamp,
    Boolean,
    Other(String),
}

impl DataType {
    /// Parameters must be positive when present.
    pub fn is_well_formed(&self) -> bool {
        match self {
            DataType::Decimal { precision, scale } => *precision > 0 && scale <= precision,
            DataType::Varchar(n) => *n > 0,
            DataType::Other(s) => !s.trim().is_empty(),
            _ => true,
        }
    }

    pub fn is_text_kind(&self) -> bool {
        matches!(self, DataType::Varchar(_) | DataType::Text | DataType::Other(_))
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataType::Int => f.write_str("INT"),
            DataType::BigInt => f.write_str("BIGINT"),
            DataType::Decimal { precision, scale } => write!(f, "DECIMAL({precision},{scale})"),
            DataType::Varchar(n) => write!(f, "VARCHAR({n})"),
            DataType::Text => f.write_str("TEXT"),
            DataType::Date => f.write_str("DATE"),
            DataType::Timestamp => f.write_str("TIMESTAMP"),
            DataType::Boolean => f.write_str("BOOLEAN"),
            DataType::Other(s) => f.write_str(s),
        }
    }
}

impl FromStr for DataType {
    type Err = String;

    /// Parses `NAME` or `NAME(args)`. Unknown names become [`DataType::Other`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty data type".into());
        }
        let (name, args) = match s.find('(') {
            Some(open) => {
                let close = s.rfind(')').ok_or_else(|| format!("unclosed `(` in `{s}`"))?;
                let args: Vec<&str> = s[open + 1..close].split(',').map(str::trim).collect();
                (s[..open].trim(), args)
            }
            None => (s, Vec::new()),
        };
        let num = |i: usize| -> Result<u32, String> {
            args.get(i)
                .ok_or_else(|| format!("missing parameter in `{s}`"))?
                .parse::<u32>()
                .map_err(|_| format!("invalid parameter in `{s}`"))
        };
        let ty = match name.to_ascii_uppercase().as_str() {
            "INT" | "INTEGER" if args.is_empty() => DataType::Int,
            "BIGINT" if args.is_empty() => DataType::BigInt,
            "DECIMAL" | "NUMERIC" => match args.len() {
                0 => DataType::Decimal { precision: 10, scale: 0 },
                1 => DataType::Decimal { precision: num(0)?, scale: 0 },
                _ => DataType::Decimal { precision: num(0)?, scale: num(1)? },
            },
            "VARCHAR" if args.len() == 1 => DataType::Varchar(num(0)?),
            "TEXT" if args.is_empty() => DataType::Text,
            "DATE" if args.is_empty() => DataType::Date,
            "TIMESTAMP" | "DATETIME" if args.is_empty() => DataType::Timestamp,
            "BOOLEAN" | "BOOL" if args.is_empty() => DataType::Boolean,
            _ => DataType::Other(s.to_string()),
        };
        Ok(ty)
    }
}

impl Serialize for DataType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DataType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Column-level annotations that SQL DDL cannot express directly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ColumnAnnotation {
    /// The column holds several values per row (non-atomic).
    Multivalued,
    /// The column is computed from the listed attributes.
    DerivedFrom(Vec<Ident>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: Ident,
    pub data_type: DataType,
    pub nullable: bool,
    #[serde(default)]
    pub annotations: Vec<ColumnAnnotation>,
}

impl Column {
    pub fn new(name: impl Into<Ident>, data_type: DataType) -> Self {
        Column { name: name.into(), data_type, nullable: true, annotations: Vec::new() }
    }

    pub fn not_null(mut self) -> Self {
        self.nullable = false;
        self
    }

    pub fn multivalued(mut self) -> Self {
        if !self.is_multivalued() {
            self.annotations.push(ColumnAnnotation::Multivalued);
        }
        self
    }

    pub fn is_multivalued(&self) -> bool {
        self.annotations.contains(&ColumnAnnotation::Multivalued)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ForeignKey {
    pub columns: Vec<Ident>,
    pub referenced_table: Ident,
    pub referenced_columns: Vec<Ident>,
}

impl ForeignKey {
    pub fn new<I: Into<Ident>>(
        columns: impl IntoIterator<Item = I>,
        referenced_table: impl Into<Ident>,
        referenced_columns: impl IntoIterator<Item = I>,
    ) -> Self {
        ForeignKey {
            columns: columns.into_iter().map(Into::into).collect(),
            referenced_table: referenced_table.into(),
            referenced_columns: referenced_columns.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: Ident,
    pub columns: Vec<Column>,
    pub primary_key: Option<Vec<Ident>>,
    #[serde(default)]
    pub foreign_keys: Vec<ForeignKey>,
}

impl Table {
    pub fn new(name: impl Into<Ident>, columns: Vec<Column>) -> Self {
        Table { name: name.into(), columns, primary_key: None, foreign_keys: Vec::new() }
    }

    pub fn with_primary_key<I: Into<Ident>>(mut self, key: impl IntoIterator<Item = I>) -> Self {
        self.primary_key = Some(key.into_iter().map(Into::into).collect());
        self
    }

    pub fn with_foreign_key(mut self, fk: ForeignKey) -> Self {
        self.foreign_keys.push(fk);
        self
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name.eq_str(name))
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.column(name).is_some()
    }

    pub fn column_names(&self) -> impl Iterator<Item = &Ident> {
        self.columns.iter().map(|c| &c.name)
    }

    pub fn column_set(&self) -> AttributeSet {
        self.column_names().cloned().collect()
    }
}

/// A set of attribute names with set semantics and case-insensitive equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttributeSet(BTreeSet<Ident>);

impl AttributeSet {
    pub fn new() -> Self {
        AttributeSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, attr: &Ident) -> bool {
        self.0.contains(attr)
    }

    pub fn insert(&mut self, attr: Ident) -> bool {
        self.0.insert(attr)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Ident> {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &AttributeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &AttributeSet) -> AttributeSet {
        AttributeSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &AttributeSet) -> AttributeSet {
        AttributeSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &AttributeSet) -> AttributeSet {
        AttributeSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn to_vec(&self) -> Vec<Ident> {
        self.0.iter().cloned().collect()
    }

    /// Comma-separated rendering in set order.
    pub fn joined(&self) -> String {
        self.0.iter().map(Ident::as_str).collect::<Vec<_>>().join(", ")
    }
}

impl<I: Into<Ident>> FromIterator<I> for AttributeSet {
    fn from_iter<T: IntoIterator<Item = I>>(iter: T) -> Self {
        AttributeSet(iter.into_iter().map(Into::into).collect())
    }
}

impl<'a> IntoIterator for &'a AttributeSet {
    type Item = &'a Ident;
    type IntoIter = std::collections::btree_set::Iter<'a, Ident>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.joined())
    }
}

/// `lhs -> rhs`, scoped to one table or global.
///
/// Global dependencies name attributes either as `table.column` or as a bare
/// column name, which then refers to every column carrying that name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FunctionalDependency {
    pub lhs: AttributeSet,
    pub rhs: AttributeSet,
    pub scope: Option<Ident>,
}

impl FunctionalDependency {
    pub fn new<L, R, I>(lhs: L, rhs: R) -> Self
    where
        L: IntoIterator<Item = I>,
        R: IntoIterator<Item = I>,
        I: Into<Ident>,
    {
        FunctionalDependency { lhs: lhs.into_iter().collect(), rhs: rhs.into_iter().collect(), scope: None }
    }

    pub fn scoped(mut self, table: impl Into<Ident>) -> Self {
        self.scope = Some(table.into());
        self
    }

    pub fn global(mut self) -> Self {
        self.scope = None;
        self
    }

    /// `lhs ⊇ rhs`.
    pub fn is_trivial(&self) -> bool {
        self.rhs.is_subset(&self.lhs)
    }

    pub fn attributes(&self) -> AttributeSet {
        self.lhs.union(&self.rhs)
    }
}

impl fmt::Display for FunctionalDependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(scope) = &self.scope {
            write!(f, "{scope}: ")?;
        }
        write!(f, "{} -> {}", self.lhs.joined(), self.rhs.joined())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub name: Ident,
    pub tables: Vec<Table>,
    #[serde(default)]
    pub fds: Vec<FunctionalDependency>,
}

/// A violated structural rule, naming the offending element.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum StructuralError {
    #[error("duplicate table \"{table}\"")]
    DuplicateTable { table: String },
    #[error("table \"{table}\" has no columns")]
    EmptyTable { table: String },
    #[error("duplicate column \"{column}\" in table \"{table}\"")]
    DuplicateColumn { table: String, column: String },
    #[error("invalid data type {data_type} for column \"{table}.{column}\"")]
    InvalidDataType { table: String, column: String, data_type: String },
    #[error("primary key of \"{table}\" names unknown column \"{column}\"")]
    UnresolvedKeyColumn { table: String, column: String },
    #[error("table \"{table}\" declares an empty primary key")]
    EmptyPrimaryKey { table: String },
    #[error("foreign key in \"{table}\" names unknown column \"{column}\"")]
    UnresolvedForeignKeyColumn { table: String, column: String },
    #[error("unresolved reference \"{referenced}\" from table \"{table}\"")]
    UnresolvedReference { table: String, referenced: String },
    #[error("foreign key from \"{table}\" references unknown column \"{referenced}.{column}\"")]
    UnresolvedReferencedColumn { table: String, referenced: String, column: String },
    #[error(
        "foreign key from \"{table}\" to \"{referenced}\" has {columns} columns but references {referenced_columns}"
    )]
    ForeignKeyArity { table: String, referenced: String, columns: usize, referenced_columns: usize },
    #[error("functional dependency scoped to unknown table \"{table}\"")]
    UnresolvedFdScope { table: String },
    #[error("unresolved FD attribute \"{attribute}\"")]
    UnresolvedFdAttribute { attribute: String },
    #[error("functional dependency {fd} has an empty side")]
    EmptyFdSide { fd: String },
    #[error("functional dependency {fd} repeats a determinant attribute on its right-hand side")]
    OverlappingFd { fd: String },
    #[error("derived column \"{table}.{column}\" names unknown attribute \"{attribute}\"")]
    UnresolvedDerivedFrom { table: String, column: String, attribute: String },
}

impl Schema {
    pub fn new(name: impl Into<Ident>, tables: Vec<Table>) -> Self {
        Schema { name: name.into(), tables, fds: Vec::new() }
    }

    pub fn with_fd(mut self, fd: FunctionalDependency) -> Self {
        self.fds.push(fd);
        self
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name.eq_str(name))
    }

    pub fn table_mut(&mut self, name: &str) -> Option<&mut Table> {
        self.tables.iter_mut().find(|t| t.name.eq_str(name))
    }

    pub fn foreign_key_count(&self) -> usize {
        self.tables.iter().map(|t| t.foreign_keys.len()).sum()
    }

    /// Every column name in the schema.
    pub fn attribute_names(&self) -> AttributeSet {
        self.tables.iter().flat_map(|t| t.column_names().cloned()).collect()
    }

    pub fn validate(&self) -> Vec<StructuralError> {
        validate_schema(self)
    }

    /// The dependencies that apply to `table`, with attribute names resolved
    /// to the table's own column names where they refer to it.
    ///
    /// Scoped dependencies of other tables are excluded. In global
    /// dependencies, `table.column` becomes `column` for this table and stays
    /// qualified (hence never matching a local column) otherwise. The
    /// implicit key dependency of a declared primary key is not included.
    pub fn fds_for_table(&self, table: &Table) -> Vec<FunctionalDependency> {
        let resolve = |set: &AttributeSet| -> AttributeSet {
            set.iter()
                .map(|a| match split_qualified(a.as_str()) {
                    Some((t, c)) if table.name.eq_str(t) => Ident::new(c),
                    _ => a.clone(),
                })
                .collect()
        };
        self.fds
            .iter()
            .filter(|fd| fd.scope.as_ref().is_none_or(|s| *s == table.name))
            .map(|fd| FunctionalDependency {
                lhs: resolve(&fd.lhs),
                rhs: resolve(&fd.rhs),
                scope: Some(table.name.clone()),
            })
            .collect()
    }

    /// Every dependency in the schema as a global dependency over bare
    /// column names; with `include_keys`, each declared primary key adds
    /// `pk -> other columns`.
    pub fn lifted_fds(&self, include_keys: bool) -> Vec<FunctionalDependency> {
        let strip = |set: &AttributeSet| -> AttributeSet {
            set.iter()
                .map(|a| match split_qualified(a.as_str()) {
                    Some((_, c)) => Ident::new(c),
                    None => a.clone(),
                })
                .collect()
        };
        let mut out: Vec<FunctionalDependency> = self
            .fds
            .iter()
            .map(|fd| FunctionalDependency { lhs: strip(&fd.lhs), rhs: strip(&fd.rhs), scope: None })
            .collect();
        if include_keys {
            for table in &self.tables {
                if let Some(fd) = key_dependency(table) {
                    out.push(FunctionalDependency { scope: None, ..fd });
                }
            }
        }
        out.retain(|fd| !fd.is_trivial());
        out.sort();
        out.dedup();
        out
    }

    pub fn canonicalize(&self) -> Result<Schema, Vec<StructuralError>> {
        canonicalize(self)
    }
}

/// `pk -> other columns` for a table with a declared primary key.
pub fn key_dependency(table: &Table) -> Option<FunctionalDependency> {
    let pk = table.primary_key.as_ref()?;
    if pk.is_empty() {
        return None;
    }
    let lhs: AttributeSet = pk.iter().cloned().collect();
    let rhs = table.column_set().difference(&lhs);
    if rhs.is_empty() {
        return None;
    }
    Some(FunctionalDependency { lhs, rhs, scope: Some(table.name.clone()) })
}

/// Splits `table.column` into its parts.
pub fn split_qualified(attr: &str) -> Option<(&str, &str)> {
    let (t, c) = attr.split_once('.')?;
    (!t.is_empty() && !c.is_empty()).then_some((t, c))
}

/// Reports every structural rule the schema violates; empty iff well formed.
pub fn validate_schema(schema: &Schema) -> Vec<StructuralError> {
    let mut errors = Vec::new();
    let mut tables: HashMap<&Ident, &Table> = HashMap::new();
    for table in &schema.tables {
        if tables.insert(&table.name, table).is_some() {
            errors.push(StructuralError::DuplicateTable { table: table.name.to_string() });
        }
    }
    let all_columns: HashSet<&Ident> = schema.tables.iter().flat_map(|t| t.column_names()).collect();

    for table in &schema.tables {
        let tname = table.name.to_string();
        if table.columns.is_empty() {
            errors.push(StructuralError::EmptyTable { table: tname.clone() });
        }
        let mut seen = HashSet::new();
        for col in &table.columns {
            if !seen.insert(&col.name) {
                errors.push(StructuralError::DuplicateColumn { table: tname.clone(), column: col.name.to_string() });
            }
            if !col.data_type.is_well_formed() {
                errors.push(StructuralError::InvalidDataType {
                    table: tname.clone(),
                    column: col.name.to_string(),
                    data_type: col.data_type.to_string(),
                });
            }
            for ann in &col.annotations {
                if let ColumnAnnotation::DerivedFrom(attrs) = ann {
                    for a in attrs {
                        if !all_columns.contains(a) && !resolves_qualified(schema, a) {
                            errors.push(StructuralError::UnresolvedDerivedFrom {
                                table: tname.clone(),
                                column: col.name.to_string(),
                                attribute: a.to_string(),
                            });
                        }
                    }
                }
            }
        }
        if let Some(pk) = &table.primary_key {
            if pk.is_empty() {
                errors.push(StructuralError::EmptyPrimaryKey { table: tname.clone() });
            }
            for c in pk {
                if !table.has_column(c.as_str()) {
                    errors.push(StructuralError::UnresolvedKeyColumn { table: tname.clone(), column: c.to_string() });
                }
            }
        }
        for fk in &table.foreign_keys {
            for c in &fk.columns {
                if !table.has_column(c.as_str()) {
                    errors.push(StructuralError::UnresolvedForeignKeyColumn {
                        table: tname.clone(),
                        column: c.to_string(),
                    });
                }
            }
            if fk.columns.len() != fk.referenced_columns.len() {
                errors.push(StructuralError::ForeignKeyArity {
                    table: tname.clone(),
                    referenced: fk.referenced_table.to_string(),
                    columns: fk.columns.len(),
                    referenced_columns: fk.referenced_columns.len(),
                });
            }
            match tables.get(&fk.referenced_table) {
                None => errors.push(StructuralError::UnresolvedReference {
                    table: tname.clone(),
                    referenced: fk.referenced_table.to_string(),
                }),
                Some(target) => {
                    for c in &fk.referenced_columns {
                        if !target.has_column(c.as_str()) {
                            errors.push(StructuralError::UnresolvedReferencedColumn {
                                table: tname.clone(),
                                referenced: fk.referenced_table.to_string(),
                                column: c.to_string(),
                            });
                        }
                    }
                }
            }
        }
    }

    for fd in &schema.fds {
        if fd.lhs.is_empty() || fd.rhs.is_empty() {
            errors.push(StructuralError::EmptyFdSide { fd: fd.to_string() });
        }
        if !fd.is_trivial() && !fd.lhs.intersection(&fd.rhs).is_empty() {
            errors.push(StructuralError::OverlappingFd { fd: fd.to_string() });
        }
        match &fd.scope {
            Some(scope) => match tables.get(scope) {
                None => errors.push(StructuralError::UnresolvedFdScope { table: scope.to_string() }),
                Some(table) => {
                    for a in fd.attributes().iter() {
                        if !table.has_column(a.as_str()) {
                            errors.push(StructuralError::UnresolvedFdAttribute { attribute: a.to_string() });
                        }
                    }
                }
            },
            None => {
                for a in fd.attributes().iter() {
                    if !all_columns.contains(a) && !resolves_qualified(schema, a) {
                        errors.push(StructuralError::UnresolvedFdAttribute { attribute: a.to_string() });
                    }
                }
            }
        }
    }
    errors
}

fn resolves_qualified(schema: &Schema, attr: &Ident) -> bool {
    split_qualified(attr.as_str()).and_then(|(t, c)| schema.table(t).map(|table| table.has_column(c))).unwrap_or(false)
}

/// Canonical form: tables sorted by name; primary-key columns first (in key
/// order) followed by the remaining columns in their original order;
/// annotations, foreign keys and dependencies sorted and deduplicated.
pub fn canonicalize(schema: &Schema) -> Result<Schema, Vec<StructuralError>> {
    let errors = validate_schema(schema);
    if !errors.is_empty() {
        return Err(errors);
    }
    let mut tables: Vec<Table> = schema.tables.iter().map(canonical_table).collect();
    tables.sort_by(|a, b| a.name.cmp(&b.name));
    let mut fds = schema.fds.clone();
    // Scoped FDs in table order, then global ones.
    fds.sort_by(|a, b| {
        (a.scope.is_none(), &a.scope, &a.lhs, &a.rhs).cmp(&(b.scope.is_none(), &b.scope, &b.lhs, &b.rhs))
    });
    fds.dedup();
    Ok(Schema { name: schema.name.clone(), tables, fds })
}

fn canonical_table(table: &Table) -> Table {
    let mut columns = Vec::with_capacity(table.columns.len());
    if let Some(pk) = &table.primary_key {
        for k in pk {
            if let Some(c) = table.column(k.as_str()) {
                columns.push(c.clone());
            }
        }
    }
    for c in &table.columns {
        if !columns.iter().any(|x: &Column| x.name == c.name) {
            columns.push(c.clone());
        }
    }
    for c in &mut columns {
        c.annotations.sort();
        c.annotations.dedup();
    }
    let mut foreign_keys = table.foreign_keys.clone();
    foreign_keys.sort();
    foreign_keys.dedup();
    Table { name: table.name.clone(), columns, primary_key: table.primary_key.clone(), foreign_keys }
}
