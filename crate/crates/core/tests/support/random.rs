use normloop::{Column, DataType, ForeignKey, FunctionalDependency, Ident, Schema, Table};
use rand::seq::IndexedRandom;
use rand::Rng;

use super::oracle::Fd;

/// Single letters, so no name looks like a numbered repeating group.
pub fn attr(i: usize) -> String {
    char::from(b'a' + i as u8).to_string()
}

pub fn index_of(name: &normloop::Ident) -> usize {
    usize::from(name.as_str().as_bytes()[0] - b'a')
}

pub fn names(mask: u32) -> Vec<String> {
    (0..32).filter(|i| mask & (1 << i) != 0).map(attr).collect()
}

pub fn mask_of(set: &normloop::AttributeSet) -> u32 {
    set.iter().map(|a| 1u32 << index_of(a)).fold(0, |m, b| m | b)
}

/// Up to `max_fds` nontrivial dependencies over `n` attributes.
pub fn fd_masks(rng: &mut impl Rng, n: usize, max_fds: usize) -> Vec<Fd> {
    let count = rng.random_range(0..=max_fds);
    let mut out = Vec::new();
    for _ in 0..count {
        let lhs = rng.random_range(1..(1u32 << n));
        let rhs = rng.random_range(1..(1u32 << n)) & !lhs;
        if rhs != 0 {
            out.push((lhs, rhs));
        }
    }
    out
}

pub fn fds(masks: &[Fd]) -> Vec<FunctionalDependency> {
    masks.iter().map(|&(l, r)| FunctionalDependency::new(names(l), names(r))).collect()
}

pub fn relation(n: usize) -> Table {
    Table::new("r", (0..n).map(|i| Column::new(attr(i), DataType::Int)).collect())
}

fn data_type(rng: &mut impl Rng) -> DataType {
    match rng.random_range(0..8) {
        0 => DataType::Int,
        1 => DataType::BigInt,
        2 => {
            let precision = rng.random_range(1..=18);
            DataType::Decimal { precision, scale: rng.random_range(0..=precision.min(4)) }
        }
        3 => DataType::Varchar(rng.random_range(1..=255)),
        4 => DataType::Text,
        5 => DataType::Date,
        6 => DataType::Timestamp,
        _ => DataType::Boolean,
    }
}

const STEMS: [&str; 10] = ["id", "code", "name", "phone", "city", "price", "qty", "label", "note", "ref"];

fn subset(rng: &mut impl Rng, items: &[Ident]) -> Vec<Ident> {
    items.iter().filter(|_| rng.random_bool(0.4)).cloned().collect()
}

/// A structurally valid schema with keys, foreign keys, dependencies and
/// the occasional multivalued column or numbered column.
pub fn schema(rng: &mut impl Rng) -> Schema {
    let table_count = rng.random_range(1..=4);
    let mut tables: Vec<Table> = Vec::new();
    let mut fds = Vec::new();
    for t in 0..table_count {
        let name = format!("t{t}");
        let width = rng.random_range(1..=6);
        let mut columns: Vec<Column> = Vec::new();
        while columns.len() < width {
            let stem = STEMS.choose(rng).unwrap();
            let col =
                if rng.random_bool(0.2) { format!("{stem}{}", rng.random_range(1..=3)) } else { format!("{stem}_{t}") };
            if columns.iter().any(|c| c.name.eq_str(&col)) {
                continue;
            }
            let mut c = Column::new(col, data_type(rng));
            c.nullable = rng.random_bool(0.5);
            if rng.random_bool(0.1) {
                c = c.multivalued();
            }
            columns.push(c);
        }
        let mut table = Table::new(name.clone(), columns);
        let cols: Vec<Ident> = table.column_names().cloned().collect();
        if rng.random_bool(0.75) {
            let mut pk = subset(rng, &cols);
            if pk.is_empty() {
                pk.push(cols[0].clone());
            }
            table.primary_key = Some(pk);
        }
        let targets: Vec<&Table> = tables.iter().filter(|p| p.primary_key.is_some()).collect();
        if let Some(parent) = targets.choose(rng).filter(|_| rng.random_bool(0.5)) {
            let referenced = parent.primary_key.clone().unwrap();
            let mut local = Vec::new();
            for (i, r) in referenced.iter().enumerate() {
                let fk_col = Ident::new(format!("fk_{}_{i}", parent.name));
                let ty = parent.column(r.as_str()).unwrap().data_type.clone();
                table.columns.push(Column::new(fk_col.clone(), ty));
                local.push(fk_col);
            }
            table.foreign_keys.push(ForeignKey::new(local, parent.name.clone(), referenced));
        }
        let cols: Vec<Ident> = table.column_names().cloned().collect();
        for _ in 0..rng.random_range(0..=2) {
            let lhs = subset(rng, &cols);
            let rhs: Vec<Ident> = subset(rng, &cols).into_iter().filter(|c| !lhs.contains(c)).collect();
            if !lhs.is_empty() && !rhs.is_empty() {
                let fd = FunctionalDependency::new(lhs, rhs);
                fds.push(if rng.random_bool(0.8) { fd.scoped(name.clone()) } else { fd });
            }
        }
        tables.push(table);
    }
    let mut schema = Schema::new("random", tables);
    schema.fds = fds;
    assert!(schema.validate().is_empty(), "{:?}", schema.validate());
    schema
}
