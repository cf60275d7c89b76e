//! SQL DDL codec for the `CREATE TABLE` subset used for all schema I/O.
//!
//! Grammar:
//!
//! ```text
//! CREATE TABLE name ( col_def {, col_def} [, PRIMARY KEY (cols)]
//!                     {, FOREIGN KEY (cols) REFERENCES name (cols)} ) ;
//! col_def := name type [NOT NULL | NULL]
//! ```
//!
//! Facts SQL cannot express travel in structured comments:
//!
//! ```text
//! -- @schema <name>
//! -- @fd <table>: a, b -> c, d      (scoped dependency)
//! -- @fd *: t.a -> u.b              (global dependency)
//! -- @multivalued <table>.<column>
//! -- @derived <table>.<column>: a, b
//! ```

mod emit;
mod extract;
mod lexer;
mod parser;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ident::Ident;
use crate::schema::{validate_schema, FunctionalDependency, Schema, StructuralError};

pub use emit::emit_ddl;
pub use extract::{extract_schema_block, ExtractionError};

/// Syntax error with a 1-based position into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("line {line}, column {column}: {message} (expected {expected})")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DdlError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("schema is structurally invalid: {}", join_errors(.0))]
    Structural(Vec<StructuralError>),
}

fn join_errors(errors: &[StructuralError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// A parsed comment directive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    SchemaName(Ident),
    Fd(FunctionalDependency),
    Multivalued { table: Ident, column: Ident },
    Derived { table: Ident, column: Ident, from: Vec<Ident> },
    Unknown(String),
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Directive::SchemaName(n) => write!(f, "@schema {n}"),
            Directive::Fd(fd) => match &fd.scope {
                Some(_) => write!(f, "@fd {fd}"),
                None => write!(f, "@fd *: {fd}"),
            },
            Directive::Multivalued { table, column } => write!(f, "@multivalued {table}.{column}"),
            Directive::Derived { table, column, from } => {
                let from: Vec<&str> = from.iter().map(Ident::as_str).collect();
                write!(f, "@derived {table}.{column}: {}", from.join(", "))
            }
            Directive::Unknown(name) => write!(f, "@{name}"),
        }
    }
}

/// A parsed DDL file together with its directives and non-fatal warnings.
#[derive(Debug, Clone)]
pub struct DdlDocument {
    pub source_text: String,
    pub schema: Schema,
    pub annotations: Vec<Directive>,
    pub warnings: Vec<String>,
}

/// Parses DDL text, keeping directives and warnings. Structural validity is
/// not checked.
pub fn parse_document(text: &str) -> Result<DdlDocument, ParseError> {
    parser::parse_document(text)
}

/// Parses DDL text into a structurally valid schema.
pub fn parse_ddl(text: &str) -> Result<Schema, DdlError> {
    let doc = parser::parse_document(text)?;
    let errors = validate_schema(&doc.schema);
    if !errors.is_empty() {
        return Err(DdlError::Structural(errors));
    }
    Ok(doc.schema)
}
