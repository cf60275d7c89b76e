use serde::{Deserialize, Serialize};

use crate::ddl::parse_ddl;
use crate::schema::{Column, ForeignKey, Schema, Table};

pub const SYNTHETIC_TABLE_NAME: &str = "synthetic_link";

const ORDERS_SQL: &str = include_str!("../../data/orders.sql");
const ADVERTISING_SQL: &str = include_str!("../../data/advertising.sql");
const AIRPORTDB_SQL: &str = include_str!("../../data/airportdb.sql");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Complexity {
    Easy,
    Medium,
    Hard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub name: &'static str,
    pub schema: Schema,
    pub complexity: Complexity,
}

impl Dataset {
    /// Extra table used to host 2NF/3NF anomalies when the schema has too few
    /// suitable tables.
    pub fn synthetic_table(&self) -> Option<Table> {
        synthetic_table(&self.schema)
    }
}

fn load(name: &'static str, sql: &str, complexity: Complexity) -> Dataset {
    let schema = parse_ddl(sql).unwrap_or_else(|e| panic!("bundled dataset {name} does not parse: {e}"));
    Dataset { name, schema, complexity }
}

/// Orders, Advertising and AirportDB, in increasing complexity.
pub fn bundled_datasets() -> Vec<Dataset> {
    vec![
        load("Orders", ORDERS_SQL, Complexity::Easy),
        load("Advertising", ADVERTISING_SQL, Complexity::Medium),
        load("AirportDB", AIRPORTDB_SQL, Complexity::Hard),
    ]
}

/// Looks a bundled dataset up by name, ignoring case.
pub fn dataset(name: &str) -> Option<Dataset> {
    bundled_datasets().into_iter().find(|d| d.name.eq_ignore_ascii_case(name))
}

/// Source DDL of a bundled dataset.
pub fn dataset_sql(name: &str) -> Option<&'static str> {
    match name.to_ascii_lowercase().as_str() {
        "orders" => Some(ORDERS_SQL),
        "advertising" => Some(ADVERTISING_SQL),
        "airportdb" => Some(AIRPORTDB_SQL),
        _ => None,
    }
}

/// A link table keyed by the single-column keys of the first two tables
/// that have one, with a foreign key to each.
pub fn synthetic_table(schema: &Schema) -> Option<Table> {
    let mut hosts = schema.tables.iter().filter_map(|t| match t.primary_key.as_deref() {
        Some([k]) => t.column(k.as_str()).map(|c| (t, c)),
        _ => None,
    });
    let (a, ka) = hosts.next()?;
    let (b, kb) = hosts.find(|(_, c)| c.name != ka.name)?;
    let columns = vec![
        Column::new(ka.name.clone(), ka.data_type.clone()).not_null(),
        Column::new(kb.name.clone(), kb.data_type.clone()).not_null(),
    ];
    Some(
        Table::new(SYNTHETIC_TABLE_NAME, columns)
            .with_primary_key([ka.name.clone(), kb.name.clone()])
            .with_foreign_key(ForeignKey::new([ka.name.clone()], a.name.clone(), [ka.name.clone()]))
            .with_foreign_key(ForeignKey::new([kb.name.clone()], b.name.clone(), [kb.name.clone()])),
    )
}
