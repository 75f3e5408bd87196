use std::fmt;

/// The three disjoint sorts of RDF terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKind {
    Iri,
    BlankNode,
    Literal,
}

/// An RDF term as it appears in N-Triples text.
///
/// The lexical form is stored exactly as written: IRIs without their angle
/// brackets, blank nodes with their `_:` prefix, and literals as the full
/// quoted token including any `@lang` or `^^<datatype>` suffix. Equality is
/// therefore purely syntactic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    kind: TermKind,
    lexical: String,
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        let lexical = iri.into();
        debug_assert!(!lexical.is_empty() && !lexical.contains(char::is_whitespace));
        Term { kind: TermKind::Iri, lexical }
    }

    /// Builds a blank node from its label, without the `_:` prefix.
    pub fn blank(label: &str) -> Self {
        Term {
            kind: TermKind::BlankNode,
            lexical: format!("_:{label}"),
        }
    }

    /// Builds a literal from its complete quoted token, e.g. `"v"@en`.
    pub fn literal_token(token: impl Into<String>) -> Self {
        let lexical = token.into();
        debug_assert!(lexical.starts_with('"'));
        Term { kind: TermKind::Literal, lexical }
    }

    /// A plain string literal with the value escaped for N-Triples.
    pub fn string_literal(value: &str) -> Self {
        let mut token = String::with_capacity(value.len() + 2);
        token.push('"');
        for c in value.chars() {
            match c {
                '"' => token.push_str("\\\""),
                '\\' => token.push_str("\\\\"),
                '\n' => token.push_str("\\n"),
                '\r' => token.push_str("\\r"),
                c => token.push(c),
            }
        }
        token.push('"');
        Term::literal_token(token)
    }

    /// A literal with a datatype IRI.
    pub fn typed_literal(value: &str, datatype: &str) -> Self {
        let base = Term::string_literal(value);
        Term::literal_token(format!("{}^^<{datatype}>", base.lexical))
    }

    pub fn kind(&self) -> TermKind {
        self.kind
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn is_iri(&self) -> bool {
        self.kind == TermKind::Iri
    }

    pub fn is_literal(&self) -> bool {
        self.kind == TermKind::Literal
    }

    pub fn is_blank(&self) -> bool {
        self.kind == TermKind::BlankNode
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TermKind::Iri => write!(f, "<{}>", self.lexical),
            TermKind::BlankNode | TermKind::Literal => f.write_str(&self.lexical),
        }
    }
}

/// An RDF statement. Construction through [`Triple::new`] checks the
/// positional sort constraints.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub s: Term,
    pub p: Term,
    pub o: Term,
}

impl Triple {
    pub fn new(s: Term, p: Term, o: Term) -> Result<Self, InvalidTriple> {
        if s.is_literal() {
            return Err(InvalidTriple::LiteralSubject);
        }
        if !p.is_iri() {
            return Err(InvalidTriple::NonIriPredicate);
        }
        Ok(Triple { s, p, o })
    }

    /// Convenience constructor for IRIs in all three positions.
    pub fn iris(s: &str, p: &str, o: &str) -> Self {
        Triple {
            s: Term::iri(s),
            p: Term::iri(p),
            o: Term::iri(o),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.s, self.p, self.o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum InvalidTriple {
    #[error("literal in subject position")]
    LiteralSubject,
    #[error("predicate must be an IRI")]
    NonIriPredicate,
}
