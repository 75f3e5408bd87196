//! Line-oriented N-Triples reading and writing.
//!
//! The reader keeps a single line buffer, so memory use is bounded by the
//! longest line rather than the input size. Terms keep their lexical form
//! exactly as written (escape sequences are validated but not decoded).

use std::io::{self, BufRead, Write};

use super::term::{Term, Triple};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// What the reader does with a line it cannot parse.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ParseMode {
    /// Yield the error; the caller decides whether to stop.
    #[default]
    Strict,
    /// Skip the line and count it.
    Lenient,
}

/// Streaming N-Triples reader.
pub struct NTriplesReader<R> {
    input: R,
    mode: ParseMode,
    buf: Vec<u8>,
    line: usize,
    skipped: usize,
}

/// Parses N-Triples from a buffered reader, yielding triples in file order.
pub fn parse_ntriples<R: BufRead>(input: R, mode: ParseMode) -> NTriplesReader<R> {
    NTriplesReader {
        input,
        mode,
        buf: Vec::new(),
        line: 0,
        skipped: 0,
    }
}

/// Parses a whole string in strict mode.
pub fn parse_ntriples_str(text: &str) -> Result<Vec<Triple>, ParseError> {
    parse_ntriples(text.as_bytes(), ParseMode::Strict).collect()
}

impl<R> NTriplesReader<R> {
    /// Lines dropped so far in lenient mode.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    /// Number of physical lines consumed so far.
    pub fn lines_read(&self) -> usize {
        self.line
    }
}

impl<R: BufRead> Iterator for NTriplesReader<R> {
    type Item = Result<Triple, ParseError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.input.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.line += 1;
            let parsed = match std::str::from_utf8(&self.buf) {
                Ok(text) => parse_line(text),
                Err(_) => Err("invalid UTF-8".to_string()),
            };
            match parsed {
                Ok(Some(triple)) => return Some(Ok(triple)),
                Ok(None) => continue,
                Err(reason) => match self.mode {
                    ParseMode::Strict => {
                        return Some(Err(ParseError::MalformedLine {
                            line: self.line,
                            reason,
                        }))
                    }
                    ParseMode::Lenient => {
                        self.skipped += 1;
                        continue;
                    }
                },
            }
        }
    }
}

/// Parses one line. Blank lines and comment lines give `Ok(None)`.
pub fn parse_line(line: &str) -> Result<Option<Triple>, String> {
    let mut cur = Cursor { text: line, pos: 0 };
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let s = match cur.peek() {
        Some('<') => cur.iri()?,
        Some('_') => cur.blank()?,
        _ => return Err(format!("column {}: expected IRI or blank node subject", cur.pos + 1)),
    };
    cur.skip_ws();
    let p = match cur.peek() {
        Some('<') => cur.iri()?,
        _ => return Err(format!("column {}: expected IRI predicate", cur.pos + 1)),
    };
    cur.skip_ws();
    let o = match cur.peek() {
        Some('<') => cur.iri()?,
        Some('_') => cur.blank()?,
        Some('"') => cur.literal()?,
        _ => return Err(format!("column {}: expected object term", cur.pos + 1)),
    };
    cur.skip_ws();
    if cur.peek() != Some('.') {
        return Err(format!("column {}: expected '.'", cur.pos + 1));
    }
    cur.pos += 1;
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some('#') {
        return Err(format!("column {}: trailing content after '.'", cur.pos + 1));
    }
    Ok(Some(Triple { s, p, o }))
}

/// Parses a single term written in N-Triples syntax, e.g. `<http://x>`.
pub fn parse_term(text: &str) -> Result<Term, String> {
    let mut cur = Cursor { text, pos: 0 };
    let term = match cur.peek() {
        Some('<') => cur.iri()?,
        Some('_') => cur.blank()?,
        Some('"') => cur.literal()?,
        _ => return Err("expected a term".into()),
    };
    if cur.pos != text.len() {
        return Err(format!("column {}: trailing content after term", cur.pos + 1));
    }
    Ok(term)
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn at_end(&self) -> bool {
        self.rest().trim_end_matches(['\n', '\r']).is_empty()
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        let trimmed = rest.trim_start_matches([' ', '\t']);
        self.pos += rest.len() - trimmed.len();
    }

    fn iri(&mut self) -> Result<Term, String> {
        let start = self.pos + 1;
        let rest = &self.text[start..];
        let end = rest
            .find('>')
            .ok_or_else(|| format!("column {}: unterminated IRI", self.pos + 1))?;
        let iri = &rest[..end];
        if iri.is_empty() {
            return Err(format!("column {}: empty IRI", self.pos + 1));
        }
        if let Some(bad) = iri
            .chars()
            .find(|c| c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`'))
        {
            return Err(format!("column {}: invalid character {bad:?} in IRI", self.pos + 1));
        }
        check_escapes(iri, false).map_err(|r| format!("column {}: {r}", self.pos + 1))?;
        self.pos = start + end + 1;
        Ok(Term::iri(iri))
    }

    fn blank(&mut self) -> Result<Term, String> {
        let rest = self.rest();
        if !rest.starts_with("_:") {
            return Err(format!("column {}: expected '_:'", self.pos + 1));
        }
        let label_src = &rest[2..];
        let mut len = 0;
        for (i, c) in label_src.char_indices() {
            let ok = if i == 0 {
                c.is_alphanumeric() || c == '_'
            } else {
                c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':') || c == '\u{b7}'
            };
            if !ok {
                break;
            }
            len = i + c.len_utf8();
        }
        let mut label = &label_src[..len];
        while label.ends_with('.') {
            label = &label[..label.len() - 1];
        }
        if label.is_empty() {
            return Err(format!("column {}: empty blank node label", self.pos + 1));
        }
        self.pos += 2 + label.len();
        Ok(Term::blank(label))
    }

    fn literal(&mut self) -> Result<Term, String> {
        let start = self.pos;
        let bytes = self.text.as_bytes();
        let mut i = start + 1;
        loop {
            match bytes.get(i) {
                None | Some(b'\n') | Some(b'\r') => {
                    return Err(format!("column {}: unterminated literal", start + 1))
                }
                Some(b'\\') => i += 2,
                Some(b'"') => break,
                Some(_) => i += 1,
            }
        }
        let body = &self.text[start + 1..i];
        check_escapes(body, true).map_err(|r| format!("column {}: {r}", start + 1))?;
        self.pos = i + 1;
        match self.peek() {
            Some('@') => {
                let rest = &self.rest()[1..];
                let tag_len = rest
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                    .unwrap_or(rest.len());
                let tag = &rest[..tag_len];
                let valid = !tag.is_empty()
                    && tag.split('-').enumerate().all(|(k, part)| {
                        !part.is_empty()
                            && (k > 0 || part.chars().all(|c| c.is_ascii_alphabetic()))
                    });
                if !valid {
                    return Err(format!("column {}: invalid language tag", self.pos + 1));
                }
                self.pos += 1 + tag_len;
            }
            Some('^') => {
                if !self.rest().starts_with("^^<") {
                    return Err(format!("column {}: expected '^^<'", self.pos + 1));
                }
                self.pos += 2;
                self.iri()?;
            }
            _ => {}
        }
        Ok(Term::literal_token(&self.text[start..self.pos]))
    }
}

fn check_escapes(s: &str, allow_echar: bool) -> Result<(), String> {
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            continue;
        }
        match chars.next() {
            Some('u') => hex_digits(&mut chars, 4)?,
            Some('U') => hex_digits(&mut chars, 8)?,
            Some('t' | 'b' | 'n' | 'r' | 'f' | '"' | '\'' | '\\') if allow_echar => {}
            other => return Err(format!("invalid escape sequence \\{}", other.unwrap_or(' '))),
        }
    }
    Ok(())
}

fn hex_digits(chars: &mut std::str::Chars<'_>, n: usize) -> Result<(), String> {
    for _ in 0..n {
        match chars.next() {
            Some(c) if c.is_ascii_hexdigit() => {}
            _ => return Err("truncated \\u escape".to_string()),
        }
    }
    Ok(())
}

/// Writes triples as N-Triples, one statement per line.
pub fn serialize_ntriples<'a, W, I>(out: &mut W, triples: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Triple>,
{
    for t in triples {
        writeln!(out, "{t}")?;
    }
    Ok(())
}

pub fn to_ntriples_string<'a, I>(triples: I) -> String
where
    I: IntoIterator<Item = &'a Triple>,
{
    let mut out = Vec::new();
    serialize_ntriples(&mut out, triples).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("terms are valid UTF-8")
}
