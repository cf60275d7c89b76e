use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Word(String),
    Number(u32),
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Number(n) => format!("number {n}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Dot => "`.`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned<T> {
    pub value: T,
    pub line: usize,
    pub column: usize,
}

/// A `-- @...` comment, with the position of the `@`.
#[derive(Debug, Clone)]
pub(crate) struct RawDirective {
    pub text: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug)]
pub(crate) struct Lexed {
    pub tokens: Vec<Spanned<Tok>>,
    pub directives: Vec<RawDirective>,
    pub end: (usize, usize),
}

pub(crate) fn lex(src: &str) -> Result<Lexed, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let mut directives = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            let mut j = i + 2;
            while j < chars.len() && chars[j] != '\n' {
                j += 1;
            }
            let body: String = chars[i + 2..j].iter().collect();
            let lead = body.len() - body.trim_start().len();
            if body.trim_start().starts_with('@') {
                directives.push(RawDirective { text: body.trim().to_string(), line, column: col + 2 + lead });
            }
            col += j - i;
            i = j;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = single {
            tokens.push(Spanned { value: tok, line, column: col });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let n = text.parse::<u32>().map_err(|_| ParseError {
                line,
                column: col,
                message: format!("number `{text}` is out of range"),
                expected: "a number below 2^32".into(),
            })?;
            tokens.push(Spanned { value: Tok::Number(n), line: start_line, column: start_col });
            col += j - i;
            i = j;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            tokens.push(Spanned { value: Tok::Word(word), line: start_line, column: start_col });
            col += j - i;
            i = j;
            continue;
        }
        return Err(ParseError {
            line,
            column: col,
            message: format!("unexpected character `{c}`"),
            expected: "an identifier, number or punctuation".into(),
        });
    }
    Ok(Lexed { tokens, directives, end: (line, col) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_directives() {
        let lexed = lex("CREATE TABLE t (\n  id INT\n);\n-- @fd t: a -> b\n-- plain").unwrap();
        let id = &lexed.tokens[4];
        assert_eq!(id.value, Tok::Word("id".into()));
        assert_eq!((id.line, id.column), (2, 3));
        assert_eq!(lexed.directives.len(), 1);
        assert_eq!(lexed.directives[0].text, "@fd t: a -> b");
        assert_eq!((lexed.directives[0].line, lexed.directives[0].column), (4, 4));
    }

    #[test]
    fn rejects_stray_characters() {
        let err = lex("CREATE TABLE t (id INT) $").unwrap_err();
        assert_eq!((err.line, err.column), (1, 25));
    }
}
