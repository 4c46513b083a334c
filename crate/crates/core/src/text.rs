//! Line-oriented helpers shared by the file parsers.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

/// A whitespace-separated token with its 1-based column.
#[derive(Debug, Clone, Copy)]
pub struct Token<'a> {
    pub text: &'a str,
    pub column: usize,
}

/// A non-blank, non-comment line with its 1-based number.
#[derive(Debug, Clone)]
pub struct Line<'a> {
    pub number: usize,
    pub text: &'a str,
}

impl<'a> Line<'a> {
    pub fn tokens(&self) -> Vec<Token<'a>> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, ch) in self.text.char_indices() {
            match (ch.is_whitespace(), start) {
                (true, Some(s)) => {
                    out.push(self.token(s, i));
                    start = None;
                }
                (false, None) => start = Some(i),
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push(self.token(s, self.text.len()));
        }
        out
    }

    fn token(&self, start: usize, end: usize) -> Token<'a> {
        Token {
            text: &self.text[start..end],
            column: self.text[..start].chars().count() + 1,
        }
    }

    pub fn error(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError::new(self.number, column, message)
    }
}

/// Lines that carry content: `#` starts a comment, blank lines are skipped.
pub fn content_lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            (!body.trim().is_empty()).then_some(Line {
                number: i + 1,
                text: body,
            })
        })
        .collect()
}

/// Parses a 1-indexed element label in `1..=n` into `0..n`.
pub fn parse_label(line: &Line<'_>, tok: Token<'_>, n: usize) -> Result<usize, ParseError> {
    let v: usize = tok
        .text
        .parse()
        .map_err(|_| line.error(tok.column, format!("expected a positive integer, found {:?}", tok.text)))?;
    if v == 0 || v > n {
        return Err(line.error(tok.column, format!("entry {v} out of range 1..={n}")));
    }
    Ok(v - 1)
}
