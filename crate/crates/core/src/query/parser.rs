//! Parser for the supported SPARQL subset:
//!
//! ```text
//! query   := prefix* SELECT DISTINCT? (var+ | '*') WHERE? group
//! prefix  := PREFIX pname ':' <iri>
//! group   := '{' (triples | group (UNION group)* | '.')* '}'
//! triples := subject verb objects (';' verb objects)*
//! objects := object (',' object)*
//! ```
//!
//! `a` abbreviates `rdf:type`; the `rdf`, `rdfs`, `owl` and `xsd` prefixes
//! are predeclared. A name with no colon resolves against the empty
//! prefix. Groups are flattened to a union of conjunctions.

use std::collections::HashMap;

use super::ast::{Bgp, PatternTerm, Query, TriplePattern};
use super::QueryError;
use crate::rdf::vocab::{OWL, RDF, RDFS, RDF_TYPE, XSD};
use crate::rdf::Term;

const UNSUPPORTED: &[&str] = &[
    "OPTIONAL", "FILTER", "MINUS", "GRAPH", "BIND", "VALUES", "SERVICE", "ORDER", "LIMIT", "OFFSET", "GROUP",
    "HAVING", "ASK", "CONSTRUCT", "DESCRIBE", "FROM", "BASE",
];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LBrace,
    RBrace,
    Dot,
    Semi,
    Comma,
    Star,
    Var(String),
    Iri(String),
    /// Prefixed or bare name, split at the first colon (`None` if bare).
    Name(Option<String>, String),
    Literal(RawLiteral),
    Other(char),
}

#[derive(Clone, Debug, PartialEq)]
struct RawLiteral {
    quoted: String,
    lang: Option<String>,
    datatype: Option<DatatypeRef>,
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

fn syntax(pos: usize, reason: impl Into<String>) -> QueryError {
    QueryError::Syntax {
        position: pos,
        reason: reason.into(),
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':')
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<Option<(usize, Tok)>, QueryError> {
        self.skip_ws();
        let start = self.pos;
        let Some(c) = self.rest().chars().next() else {
            return Ok(None);
        };
        let single = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '.' => Some(Tok::Dot),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok(Some((start, t)));
        }
        let tok = match c {
            '?' | '$' => {
                let name: String = self.rest()[1..].chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
                if name.is_empty() {
                    return Err(syntax(start, "empty variable name"));
                }
                self.pos += 1 + name.len();
                Tok::Var(name)
            }
            '<' => Tok::Iri(self.iri()?),
            '"' => Tok::Literal(self.literal()?),
            '\'' => Tok::Literal(self.single_quoted()?),
            c if c.is_ascii_digit() || ((c == '-' || c == '+') && self.rest()[1..].starts_with(|d: char| d.is_ascii_digit())) => {
                Tok::Literal(self.number())
            }
            c if c.is_alphabetic() || c == '_' || c == ':' => {
                let mut word: String = self.rest().chars().take_while(|c| is_name_char(*c)).collect();
                while word.ends_with('.') {
                    word.pop();
                }
                self.pos += word.len();
                match word.split_once(':') {
                    Some((p, l)) => Tok::Name(Some(p.to_string()), l.to_string()),
                    None => Tok::Name(None, word),
                }
            }
            c => {
                self.pos += c.len_utf8();
                Tok::Other(c)
            }
        };
        Ok(Some((start, tok)))
    }

    fn iri(&mut self) -> Result<String, QueryError> {
        let start = self.pos;
        let body = &self.rest()[1..];
        let end = body.find('>').ok_or_else(|| syntax(start, "unterminated IRI"))?;
        let iri = &body[..end];
        if iri.is_empty() || iri.contains(|c: char| c.is_whitespace() || c == '<' || c == '"') {
            return Err(syntax(start, "invalid IRI"));
        }
        self.pos += end + 2;
        Ok(iri.to_string())
    }

    /// A double-quoted literal is kept as written so it compares equal to
    /// the same token in N-Triples data.
    fn literal(&mut self) -> Result<RawLiteral, QueryError> {
        let start = self.pos;
        let mut escaped = false;
        let mut end = None;
        for (i, c) in self.rest().char_indices().skip(1) {
            match c {
                '\n' | '\r' => break,
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => {
                    end = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let end = end.ok_or_else(|| syntax(start, "unterminated literal"))?;
        let quoted = self.rest()[..=end].to_string();
        self.pos += end + 1;
        self.literal_suffix(quoted)
    }

    fn single_quoted(&mut self) -> Result<RawLiteral, QueryError> {
        let start = self.pos;
        let body = &self.rest()[1..];
        let end = body.find('\'').ok_or_else(|| syntax(start, "unterminated literal"))?;
        let value = &body[..end];
        if value.contains(['\\', '\n']) {
            return Err(syntax(start, "escapes are only supported in double-quoted literals"));
        }
        let token = Term::string_literal(value).lexical().to_string();
        self.pos += end + 2;
        self.literal_suffix(token)
    }

    fn literal_suffix(&mut self, quoted: String) -> Result<RawLiteral, QueryError> {
        let mut lit = RawLiteral {
            quoted,
            lang: None,
            datatype: None,
        };
        let rest = self.rest();
        if let Some(after) = rest.strip_prefix('@') {
            let lang: String = after.chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '-').collect();
            if lang.is_empty() {
                return Err(syntax(self.pos, "empty language tag"));
            }
            self.pos += 1 + lang.len();
            lit.lang = Some(lang);
        } else if rest.starts_with("^^") {
            self.pos += 2;
            let at = self.pos;
            lit.datatype = Some(match self.next()? {
                Some((_, Tok::Iri(i))) => DatatypeRef::Iri(i),
                Some((_, Tok::Name(Some(p), l))) => DatatypeRef::Prefixed(p, l),
                _ => return Err(syntax(at, "expected datatype IRI")),
            });
        }
        Ok(lit)
    }

    fn number(&mut self) -> RawLiteral {
        let rest = self.rest();
        let mut len = rest.chars().next().map_or(0, |c| usize::from(c == '-' || c == '+'));
        len += rest[len..].chars().take_while(|c| c.is_ascii_digit()).count();
        let mut decimal = false;
        if rest[len..].starts_with('.') && rest[len + 1..].starts_with(|c: char| c.is_ascii_digit()) {
            decimal = true;
            len += 1 + rest[len + 1..].chars().take_while(|c| c.is_ascii_digit()).count();
        }
        let lexical = &rest[..len];
        self.pos += len;
        let dt = if decimal { "decimal" } else { "integer" };
        RawLiteral {
            quoted: format!("\"{lexical}\""),
            lang: None,
            datatype: Some(DatatypeRef::Iri(format!("{XSD}{dt}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum DatatypeRef {
    Iri(String),
    Prefixed(String, String),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    prefixes: HashMap<String, String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name(None, w)) if w.eq_ignore_ascii_case(kw))
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), QueryError> {
        if !self.keyword(kw) {
            return Err(syntax(self.pos(), format!("expected {kw}")));
        }
        self.at += 1;
        Ok(())
    }

    fn check_unsupported(&self) -> Result<(), QueryError> {
        if let Some(Tok::Name(None, w)) = self.peek() {
            let upper = w.to_ascii_uppercase();
            if UNSUPPORTED.contains(&upper.as_str()) {
                return Err(QueryError::UnsupportedFeature(upper));
            }
        }
        Ok(())
    }

    fn expand(&self, prefix: Option<&str>, local: &str, pos: usize) -> Result<String, QueryError> {
        let key = prefix.unwrap_or("");
        let ns = self
            .prefixes
            .get(key)
            .ok_or_else(|| syntax(pos, format!("undeclared prefix `{key}:`")))?;
        Ok(format!("{ns}{local}"))
    }

    fn resolve_literal(&self, lit: RawLiteral, pos: usize) -> Result<Term, QueryError> {
        let RawLiteral { quoted, lang, datatype } = lit;
        Ok(Term::literal_token(match (lang, datatype) {
            (Some(lang), _) => format!("{quoted}@{lang}"),
            (None, Some(DatatypeRef::Iri(i))) => format!("{quoted}^^<{i}>"),
            (None, Some(DatatypeRef::Prefixed(p, l))) => format!("{quoted}^^<{}>", self.expand(Some(&p), &l, pos)?),
            (None, None) => quoted,
        }))
    }

    fn term(&mut self) -> Result<PatternTerm, QueryError> {
        self.check_unsupported()?;
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Var(v)) => Ok(PatternTerm::Var(v)),
            Some(Tok::Iri(i)) => Ok(PatternTerm::Const(Term::iri(i))),
            Some(Tok::Name(None, w)) if w == "a" => Ok(PatternTerm::iri(RDF_TYPE)),
            Some(Tok::Name(p, l)) if !l.is_empty() || p.is_some() => {
                Ok(PatternTerm::Const(Term::iri(self.expand(p.as_deref(), &l, pos)?)))
            }
            Some(Tok::Literal(t)) => Ok(PatternTerm::Const(self.resolve_literal(t, pos)?)),
            Some(Tok::Name(None, w)) if w.starts_with('_') => Err(QueryError::UnsupportedFeature("blank nodes in patterns".into())),
            _ => Err(syntax(pos, "expected a variable, IRI or literal")),
        }
    }

    fn triples(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), QueryError> {
        let pos = self.pos();
        let s = self.term()?;
        if matches!(&s, PatternTerm::Const(t) if t.is_literal()) {
            return Err(syntax(pos, "a literal cannot be a subject"));
        }
        loop {
            let ppos = self.pos();
            let p = self.term()?;
            if matches!(&p, PatternTerm::Const(t) if !t.is_iri()) {
                return Err(syntax(ppos, "predicate must be an IRI or variable"));
            }
            loop {
                let o = self.term()?;
                out.push(TriplePattern::new(s.clone(), p.clone(), o));
                if self.peek() == Some(&Tok::Comma) {
                    self.at += 1;
                } else {
                    break;
                }
            }
            if self.peek() == Some(&Tok::Semi) {
                self.at += 1;
                // A dangling `;` before `.` or `}` is allowed.
                if matches!(self.peek(), Some(Tok::Dot | Tok::RBrace)) {
                    return Ok(());
                }
            } else {
                return Ok(());
            }
        }
    }

    /// Parses `{ ... }` into a union of conjunctions.
    fn group(&mut self) -> Result<Vec<Vec<TriplePattern>>, QueryError> {
        if self.bump() != Some(Tok::LBrace) {
            return Err(syntax(self.toks.get(self.at - 1).map_or(self.end, |t| t.0), "expected '{'"));
        }
        let mut dnf: Vec<Vec<TriplePattern>> = vec![Vec::new()];
        loop {
            self.check_unsupported()?;
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.at += 1;
                    return Ok(dnf);
                }
                Some(Tok::Dot) => {
                    self.at += 1;
                }
                Some(Tok::LBrace) => {
                    let mut alts = self.group()?;
                    while self.keyword("UNION") {
                        self.at += 1;
                        alts.extend(self.group()?);
                    }
                    dnf = dnf
                        .iter()
                        .flat_map(|conj| {
                            alts.iter().map(move |alt| {
                                let mut c = conj.clone();
                                c.extend(alt.iter().cloned());
                                c
                            })
                        })
                        .collect();
                }
                None => return Err(syntax(self.end, "unexpected end of query")),
                _ => {
                    let mut pats = Vec::new();
                    self.triples(&mut pats)?;
                    for conj in &mut dnf {
                        conj.extend(pats.iter().cloned());
                    }
                    self.check_unsupported()?;
                    if !matches!(self.peek(), Some(Tok::Dot | Tok::RBrace | Tok::LBrace)) {
                        return Err(syntax(self.pos(), "expected '.' or '}'"));
                    }
                }
            }
        }
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        while self.keyword("PREFIX") {
            self.at += 1;
            let pos = self.pos();
            let prefix = match self.bump() {
                Some(Tok::Name(Some(p), l)) if l.is_empty() => p,
                _ => return Err(syntax(pos, "expected `prefix:`")),
            };
            let pos = self.pos();
            let Some(Tok::Iri(iri)) = self.bump() else {
                return Err(syntax(pos, "expected namespace IRI"));
            };
            self.prefixes.insert(prefix, iri);
        }
        self.check_unsupported()?;
        self.expect_keyword("SELECT")?;
        let distinct = self.keyword("DISTINCT");
        if distinct {
            self.at += 1;
        }
        let mut projection = Vec::new();
        let mut star = false;
        if self.peek() == Some(&Tok::Star) {
            self.at += 1;
            star = true;
        } else {
            while let Some(Tok::Var(v)) = self.peek() {
                if !projection.contains(v) {
                    projection.push(v.clone());
                }
                self.at += 1;
            }
            if projection.is_empty() {
                return Err(syntax(self.pos(), "expected projected variables or '*'"));
            }
        }
        self.check_unsupported()?;
        if self.keyword("WHERE") {
            self.at += 1;
        }
        let dnf = self.group()?;
        self.check_unsupported()?;
        if self.at < self.toks.len() {
            return Err(syntax(self.pos(), "trailing content after query"));
        }
        let body: Vec<Bgp> = dnf.into_iter().map(Bgp::new).collect();
        if star {
            for b in &body {
                for v in b.vars() {
                    if !projection.iter().any(|p| p == v) {
                        projection.push(v.to_string());
                    }
                }
            }
        }
        let q = Query {
            projection,
            distinct,
            body,
        };
        validate(&q)?;
        Ok(q)
    }
}

/// Checks that every projected variable occurs in every branch.
pub fn validate(q: &Query) -> Result<(), QueryError> {
    for (i, b) in q.body.iter().enumerate() {
        let vars = b.vars();
        if let Some(v) = q.projection.iter().find(|v| !vars.contains(&v.as_str())) {
            return Err(QueryError::Invalid(format!("projected variable ?{v} does not occur in branch {}", i + 1)));
        }
        if b.patterns.is_empty() {
            return Err(QueryError::Invalid(format!("branch {} has no triple patterns", i + 1)));
        }
    }
    Ok(())
}

pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    parse_query_with_prefixes(text, &[])
}

/// Parses with extra predeclared prefixes, e.g. `("", "http://x#")` so bare
/// names like `Professor` resolve.
pub fn parse_query_with_prefixes(text: &str, prefixes: &[(&str, &str)]) -> Result<Query, QueryError> {
    let mut lexer = Lexer { text, pos: 0 };
    let mut toks = Vec::new();
    while let Some(t) = lexer.next()? {
        toks.push(t);
    }
    let mut map: HashMap<String, String> = [("rdf", RDF), ("rdfs", RDFS), ("owl", OWL), ("xsd", XSD)]
        .into_iter()
        .map(|(p, n)| (p.to_string(), n.to_string()))
        .collect();
    for (p, n) in prefixes {
        map.insert(p.to_string(), n.to_string());
    }
    let mut parser = Parser {
        toks,
        at: 0,
        end: text.len(),
        prefixes: map,
    };
    parser.query()
}
