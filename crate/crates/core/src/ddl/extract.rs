use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no DDL found in model reply: {reason}")]
pub struct ExtractionError {
    pub reason: String,
}

/// Pulls DDL text out of a free-text model reply.
///
/// The contents of the first fenced code block win. Without a fence, the
/// longest contiguous run of lines that start with `CREATE TABLE` or `--`
/// (and the bodies of the statements they open) is returned.
pub fn extract_schema_block(llm_reply: &str) -> Result<String, ExtractionError> {
    if let Some(block) = first_fence(llm_reply) {
        return Ok(block);
    }
    longest_ddl_run(llm_reply).ok_or_else(|| ExtractionError {
        reason: "reply has neither a fenced code block nor CREATE TABLE statements".into(),
    })
}

fn first_fence(text: &str) -> Option<String> {
    let mut lines = text.lines();
    lines.by_ref().find(|l| l.trim_start().starts_with("```"))?;
    let mut body = Vec::new();
    for line in lines {
        if line.trim_start().starts_with("```") {
            return Some(join(&body));
        }
        body.push(line);
    }
    // An unterminated fence still carries the DDL the model meant to send.
    Some(join(&body))
}

fn longest_ddl_run(text: &str) -> Option<String> {
    let mut best: Option<Vec<&str>> = None;
    let mut current: Vec<&str> = Vec::new();
    let mut has_create = false;
    let mut depth: i64 = 0;
    for line in text.lines() {
        let t = line.trim_start();
        let starts_create = t.get(..12).is_some_and(|p| p.eq_ignore_ascii_case("CREATE TABLE"));
        if depth > 0 || starts_create || t.starts_with("--") {
            current.push(line);
            has_create |= starts_create;
            if !t.starts_with("--") {
                depth += paren_balance(t);
            }
            if depth < 0 {
                depth = 0;
            }
        } else {
            flush(&mut current, &mut has_create, &mut best);
        }
    }
    flush(&mut current, &mut has_create, &mut best);
    best.map(|b| join(&b))
}

fn flush<'a>(current: &mut Vec<&'a str>, has_create: &mut bool, best: &mut Option<Vec<&'a str>>) {
    if *has_create && best.as_ref().is_none_or(|b| current.len() > b.len()) {
        *best = Some(std::mem::take(current));
    }
    current.clear();
    *has_create = false;
}

fn paren_balance(line: &str) -> i64 {
    let code = line.split("--").next().unwrap_or("");
    code.chars()
        .map(|c| match c {
            '(' => 1,
            ')' => -1,
            _ => 0,
        })
        .sum()
}

fn join(lines: &[&str]) -> String {
    let mut s = lines.join("\n");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fenced_block() {
        let got = extract_schema_block("Here you go:\n```\nCREATE TABLE t (id INT, PRIMARY KEY (id));\n```").unwrap();
        assert_eq!(got, "CREATE TABLE t (id INT, PRIMARY KEY (id));\n");
    }

    #[test]
    fn first_of_two_fences() {
        let got = extract_schema_block("```sql\nCREATE TABLE a (x INT);\n```\nand\n```\nCREATE TABLE b (y INT);\n```")
            .unwrap();
        assert_eq!(got, "CREATE TABLE a (x INT);\n");
    }

    #[test]
    fn refusal_is_an_error() {
        assert!(extract_schema_block("I cannot help with that.").is_err());
    }

    #[test]
    fn unfenced_statements_spanning_lines() {
        let reply = "Sure.\n-- @schema s\nCREATE TABLE t (\n  id INT,\n  PRIMARY KEY (id)\n);\n-- @fd t: id -> id\nThat is all.";
        let got = extract_schema_block(reply).unwrap();
        assert!(got.starts_with("-- @schema s\nCREATE TABLE t ("));
        assert!(got.ends_with("-- @fd t: id -> id\n"));
        assert!(crate::ddl::parse_ddl(&got).is_ok());
    }

    #[test]
    fn comment_only_run_is_not_ddl() {
        assert!(extract_schema_block("-- just a comment\nnothing else").is_err());
    }
}
