use std::fmt::Write as _;

use crate::ident::Ident;
use crate::schema::{canonicalize, ColumnAnnotation, Schema, StructuralError};

use super::Directive;

/// Renders `schema` as canonical DDL text. The output depends only on the
/// canonical form of the schema, so emitting is byte-stable.
pub fn emit_ddl(schema: &Schema) -> Result<String, Vec<StructuralError>> {
    let schema = canonicalize(schema)?;
    let mut out = String::new();
    let _ = writeln!(out, "-- {}", Directive::SchemaName(schema.name.clone()));
    for table in &schema.tables {
        out.push('\n');
        let _ = writeln!(out, "CREATE TABLE {} (", table.name);
        let mut lines: Vec<String> = table
            .columns
            .iter()
            .map(|c| {
                let null = if c.nullable { "" } else { " NOT NULL" };
                format!("  {} {}{null}", c.name, c.data_type)
            })
            .collect();
        if let Some(pk) = &table.primary_key {
            lines.push(format!("  PRIMARY KEY ({})", join(pk)));
        }
        for fk in &table.foreign_keys {
            lines.push(format!(
                "  FOREIGN KEY ({}) REFERENCES {} ({})",
                join(&fk.columns),
                fk.referenced_table,
                join(&fk.referenced_columns)
            ));
        }
        out.push_str(&lines.join(",\n"));
        out.push_str("\n);\n");
        for c in &table.columns {
            for ann in &c.annotations {
                let d = match ann {
                    ColumnAnnotation::Multivalued => {
                        Directive::Multivalued { table: table.name.clone(), column: c.name.clone() }
                    }
                    ColumnAnnotation::DerivedFrom(from) => {
                        Directive::Derived { table: table.name.clone(), column: c.name.clone(), from: from.clone() }
                    }
                };
                let _ = writeln!(out, "-- {d}");
            }
        }
        for fd in schema.fds.iter().filter(|fd| fd.scope.as_ref() == Some(&table.name)) {
            let _ = writeln!(out, "-- {}", Directive::Fd(fd.clone()));
        }
    }
    let globals: Vec<_> = schema.fds.iter().filter(|fd| fd.scope.is_none()).collect();
    if !globals.is_empty() {
        out.push('\n');
        for fd in globals {
            let _ = writeln!(out, "-- {}", Directive::Fd(fd.clone()));
        }
    }
    Ok(out)
}

fn join(ids: &[Ident]) -> String {
    ids.iter().map(Ident::as_str).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddl::parse_ddl;
    use crate::schema::{Column, DataType, FunctionalDependency, Table};

    fn sample() -> Schema {
        let t = Table::new(
            "e",
            vec![
                Column::new("eid", DataType::Int).not_null(),
                Column::new("did", DataType::Int),
                Column::new("dname", DataType::Varchar(40)),
            ],
        )
        .with_primary_key(["eid"]);
        Schema::new("company", vec![t]).with_fd(FunctionalDependency::new(["did"], ["dname"]).scoped("e"))
    }

    #[test]
    fn fixed_text() {
        let text = emit_ddl(&sample()).unwrap();
        assert_eq!(
            text,
            "-- @schema company\n\nCREATE TABLE e (\n  eid INT NOT NULL,\n  did INT,\n  dname VARCHAR(40),\n  PRIMARY KEY (eid)\n);\n-- @fd e: did -> dname\n"
        );
        assert_eq!(emit_ddl(&sample()).unwrap(), text);
    }

    #[test]
    fn one_fd_line_per_dependency() {
        let s = sample()
            .with_fd(FunctionalDependency::new(["eid"], ["did"]).scoped("e"))
            .with_fd(FunctionalDependency::new(["e.did"], ["e.dname"]));
        let text = emit_ddl(&s).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("-- @fd")).count(), 3);
        assert!(text.contains("-- @fd *: e.did -> e.dname"));
        assert_eq!(parse_ddl(&text).unwrap(), canonicalize(&s).unwrap());
    }

    #[test]
    fn rejects_invalid_schema() {
        let mut s = sample();
        s.tables[0].primary_key = Some(vec!["ghost".into()]);
        assert!(emit_ddl(&s).is_err());
    }
}
