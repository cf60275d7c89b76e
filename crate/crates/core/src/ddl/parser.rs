use crate::ident::Ident;
use crate::schema::{
    AttributeSet, Column, ColumnAnnotation, DataType, ForeignKey, FunctionalDependency, Schema, Table,
};

use super::lexer::{lex, RawDirective, Spanned, Tok};
use super::{DdlDocument, Directive, ParseError};

pub(crate) const DEFAULT_SCHEMA_NAME: &str = "schema";

struct Parser {
    tokens: Vec<Spanned<Tok>>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.value)
    }

    fn peek_word(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn peek_word_at(&self, offset: usize, kw: &str) -> bool {
        matches!(self.tokens.get(self.pos + offset).map(|t| &t.value), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn error(&self, message: impl Into<String>, expected: impl Into<String>) -> ParseError {
        let (line, column) = match self.tokens.get(self.pos) {
            Some(t) => (t.line, t.column),
            None => self.end,
        };
        ParseError { line, column, message: message.into(), expected: expected.into() }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(tok) => self.error(format!("unexpected {}", tok.describe()), expected),
            None => self.error("unexpected end of input", expected),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.peek_word(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("keyword {kw}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<Ident, ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let id = Ident::new(w.clone());
                self.pos += 1;
                Ok(id)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<Ident>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = vec![self.ident("a column name")?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            out.push(self.ident("a column name")?);
        }
        self.expect(Tok::RParen, "`,` or `)`")?;
        Ok(out)
    }

    fn data_type(&mut self) -> Result<(DataType, Option<String>), ParseError> {
        let name = self.ident("a data type")?;
        let mut text = name.to_string().to_ascii_uppercase();
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let mut args = Vec::new();
            loop {
                match self.peek() {
                    Some(Tok::Number(n)) => {
                        args.push(n.to_string());
                        self.pos += 1;
                    }
                    _ => return Err(self.unexpected("a type parameter")),
                }
                match self.peek() {
                    Some(Tok::Comma) => self.pos += 1,
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.unexpected("`,` or `)`")),
                }
            }
            text = format!("{text}({})", args.join(","));
        }
        let ty: DataType = text.parse().map_err(|m: String| self.error(m, "a data type"))?;
        let warning = match &ty {
            DataType::Other(s) => Some(format!("unknown data type `{s}` kept verbatim as text")),
            _ => None,
        };
        Ok((ty, warning))
    }

    fn create_table(&mut self, warnings: &mut Vec<String>) -> Result<Table, ParseError> {
        self.keyword("CREATE")?;
        self.keyword("TABLE")?;
        if self.peek_word("IF") {
            self.pos += 1;
            self.keyword("NOT")?;
            self.keyword("EXISTS")?;
        }
        let name = self.ident("a table name")?;
        self.expect(Tok::LParen, "`(`")?;
        let mut table = Table::new(name, Vec::new());
        loop {
            if self.peek_word("CONSTRAINT") {
                self.pos += 1;
                self.ident("a constraint name")?;
            }
            if self.peek_word("PRIMARY") {
                self.pos += 1;
                self.keyword("KEY")?;
                let cols = self.ident_list()?;
                if table.primary_key.is_some() {
                    return Err(self.error("duplicate PRIMARY KEY clause", "at most one PRIMARY KEY"));
                }
                table.primary_key = Some(cols);
            } else if self.peek_word("FOREIGN") {
                self.pos += 1;
                self.keyword("KEY")?;
                let columns = self.ident_list()?;
                self.keyword("REFERENCES")?;
                let referenced_table = self.ident("a table name")?;
                let referenced_columns = self.ident_list()?;
                table.foreign_keys.push(ForeignKey { columns, referenced_table, referenced_columns });
            } else {
                let name = self.ident("a column definition or table constraint")?;
                let (data_type, warning) = self.data_type()?;
                if let Some(w) = warning {
                    warnings.push(format!("{}.{}: {w}", table.name, name));
                }
                let mut column = Column::new(name.clone(), data_type);
                loop {
                    if self.peek_word("NOT") && self.peek_word_at(1, "NULL") {
                        self.pos += 2;
                        column.nullable = false;
                    } else if self.peek_word("NULL") {
                        self.pos += 1;
                        column.nullable = true;
                    } else if self.peek_word("PRIMARY") {
                        self.pos += 1;
                        self.keyword("KEY")?;
                        if table.primary_key.is_some() {
                            return Err(self.error("duplicate PRIMARY KEY clause", "at most one PRIMARY KEY"));
                        }
                        table.primary_key = Some(vec![name.clone()]);
                    } else {
                        break;
                    }
                }
                table.columns.push(column);
            }
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RParen) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.unexpected("`,` or `)`")),
            }
        }
        if self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
        } else if self.pos < self.tokens.len() {
            return Err(self.unexpected("`;`"));
        }
        Ok(table)
    }
}

fn directive_error(d: &RawDirective, message: impl Into<String>, expected: &str) -> ParseError {
    ParseError { line: d.line, column: d.column, message: message.into(), expected: expected.into() }
}

fn parse_attr_list(d: &RawDirective, text: &str, allow_qualified: bool) -> Result<AttributeSet, ParseError> {
    let mut out = AttributeSet::new();
    for part in text.split(',') {
        let part = part.trim();
        let ok = if allow_qualified {
            part.split('.').count() <= 2 && part.split('.').all(Ident::is_valid)
        } else {
            Ident::is_valid(part)
        };
        if !ok {
            return Err(directive_error(d, format!("invalid attribute `{part}`"), "an attribute name"));
        }
        out.insert(Ident::new(part));
    }
    Ok(out)
}

fn parse_site(d: &RawDirective, text: &str) -> Result<(Ident, Ident), ParseError> {
    let (t, c) = text.trim().split_once('.').ok_or_else(|| {
        directive_error(d, format!("`{}` is not of the form table.column", text.trim()), "table.column")
    })?;
    if !Ident::is_valid(t.trim()) || !Ident::is_valid(c.trim()) {
        return Err(directive_error(d, format!("invalid site `{}`", text.trim()), "table.column"));
    }
    Ok((Ident::new(t.trim()), Ident::new(c.trim())))
}

fn parse_directive(d: &RawDirective) -> Result<Directive, ParseError> {
    let body = d.text.trim_start_matches('@');
    let (name, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
    let rest = rest.trim();
    match name.to_ascii_lowercase().as_str() {
        "schema" => {
            if !Ident::is_valid(rest) {
                return Err(directive_error(d, format!("invalid schema name `{rest}`"), "an identifier"));
            }
            Ok(Directive::SchemaName(Ident::new(rest)))
        }
        "fd" => {
            let (scope, deps) = rest
                .split_once(':')
                .ok_or_else(|| directive_error(d, "missing `:` after the table name", "`<table>: lhs -> rhs`"))?;
            let scope = scope.trim();
            let (lhs, rhs) = deps.split_once("->").ok_or_else(|| directive_error(d, "missing `->`", "`lhs -> rhs`"))?;
            let global = scope == "*";
            if !global && !Ident::is_valid(scope) {
                return Err(directive_error(d, format!("invalid table `{scope}`"), "a table name or `*`"));
            }
            let fd = FunctionalDependency {
                lhs: parse_attr_list(d, lhs, global)?,
                rhs: parse_attr_list(d, rhs, global)?,
                scope: (!global).then(|| Ident::new(scope)),
            };
            Ok(Directive::Fd(fd))
        }
        "multivalued" => {
            let (table, column) = parse_site(d, rest)?;
            Ok(Directive::Multivalued { table, column })
        }
        "derived" => {
            let (site, attrs) =
                rest.split_once(':').ok_or_else(|| directive_error(d, "missing `:`", "`table.column: attrs`"))?;
            let (table, column) = parse_site(d, site)?;
            let from = parse_attr_list(d, attrs, true)?.to_vec();
            Ok(Directive::Derived { table, column, from })
        }
        other => Ok(Directive::Unknown(other.to_string())),
    }
}

pub(crate) fn parse_document(text: &str) -> Result<DdlDocument, ParseError> {
    let lexed = lex(text)?;
    let mut parser = Parser { tokens: lexed.tokens, pos: 0, end: lexed.end };
    let mut warnings = Vec::new();
    let mut tables = Vec::new();
    while parser.pos < parser.tokens.len() {
        if parser.peek() == Some(&Tok::Semi) {
            parser.pos += 1;
            continue;
        }
        tables.push(parser.create_table(&mut warnings)?);
    }

    let mut schema = Schema::new(DEFAULT_SCHEMA_NAME, tables);
    let mut annotations = Vec::new();
    for raw in &lexed.directives {
        let directive = parse_directive(raw)?;
        match &directive {
            Directive::SchemaName(name) => schema.name = name.clone(),
            Directive::Fd(fd) => schema.fds.push(fd.clone()),
            Directive::Multivalued { table, column } | Directive::Derived { table, column, .. } => {
                let target = schema
                    .table_mut(table.as_str())
                    .and_then(|t| t.columns.iter_mut().find(|c| c.name == *column))
                    .ok_or_else(|| {
                        directive_error(raw, format!("unknown column `{table}.{column}`"), "an existing table.column")
                    })?;
                let ann = match &directive {
                    Directive::Derived { from, .. } => ColumnAnnotation::DerivedFrom(from.clone()),
                    _ => ColumnAnnotation::Multivalued,
                };
                if !target.annotations.contains(&ann) {
                    target.annotations.push(ann);
                }
            }
            Directive::Unknown(name) => {
                warnings.push(format!("line {}: unknown directive `@{name}` ignored", raw.line))
            }
        }
        annotations.push(directive);
    }
    Ok(DdlDocument { source_text: text.to_string(), schema, annotations, warnings })
}
