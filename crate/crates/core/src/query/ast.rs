use std::collections::BTreeSet;
use std::fmt;

use crate::rdf::vocab::RDF_TYPE;
use crate::rdf::Term;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternTerm {
    Var(String),
    Const(Term),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(name.to_string())
    }

    pub fn iri(iri: &str) -> Self {
        PatternTerm::Const(Term::iri(iri))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&Term> {
        match self {
            PatternTerm::Const(t) => Some(t),
            PatternTerm::Var(_) => None,
        }
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Const(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriplePattern {
    pub s: PatternTerm,
    pub p: PatternTerm,
    pub o: PatternTerm,
}

impl TriplePattern {
    pub fn new(s: PatternTerm, p: PatternTerm, o: PatternTerm) -> Self {
        Self { s, p, o }
    }

    /// `true` for `?s rdf:type <C>`-shaped patterns with a constant predicate.
    pub fn is_type(&self) -> bool {
        self.p.as_const().is_some_and(|p| p.is_iri() && p.lexical() == RDF_TYPE)
    }

    /// Distinct variables in s, p, o order.
    pub fn vars(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::with_capacity(3);
        for t in [&self.s, &self.p, &self.o] {
            if let Some(v) = t.as_var() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.s, self.p, self.o)
    }
}

/// A conjunction of patterns. `non_literal` lists variables that must not
/// bind to literals; only rewriting produces such guards.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bgp {
    pub patterns: Vec<TriplePattern>,
    pub non_literal: BTreeSet<String>,
}

impl Bgp {
    pub fn new(patterns: Vec<TriplePattern>) -> Self {
        Self {
            patterns,
            non_literal: BTreeSet::new(),
        }
    }

    /// Distinct variables in first-occurrence order.
    pub fn vars(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for p in &self.patterns {
            for v in p.vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

impl fmt::Display for Bgp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for p in &self.patterns {
            write!(f, " {p}")?;
        }
        for v in &self.non_literal {
            write!(f, " FILTER(!isLiteral(?{v}))")?;
        }
        write!(f, " }}")
    }
}

/// `SELECT projection WHERE { bgp } UNION { bgp } ...`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub projection: Vec<String>,
    pub distinct: bool,
    pub body: Vec<Bgp>,
}

impl Query {
    pub fn single(projection: &[&str], patterns: Vec<TriplePattern>) -> Self {
        Self {
            projection: projection.iter().map(|v| v.to_string()).collect(),
            distinct: false,
            body: vec![Bgp::new(patterns)],
        }
    }

    pub fn branch_count(&self) -> usize {
        self.body.len()
    }

    pub fn pattern_count(&self) -> usize {
        self.body.iter().map(|b| b.patterns.len()).sum()
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SELECT ")?;
        if self.distinct {
            write!(f, "DISTINCT ")?;
        }
        for v in &self.projection {
            write!(f, "?{v} ")?;
        }
        write!(f, "WHERE {{")?;
        for (i, b) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, " UNION")?;
            }
            write!(f, " {b}")?;
        }
        write!(f, " }}")
    }
}

/// One alternative of a disjunctive group: a pattern plus a literal guard
/// on one of its variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alternative {
    pub pattern: TriplePattern,
    pub non_literal: Option<String>,
}

/// A pattern replaced by its alternatives. `vars` are the variables of the
/// original pattern, which every alternative binds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjunctiveGroup {
    pub vars: Vec<String>,
    pub alternatives: Vec<Alternative>,
}

/// Conjunction of OR groups, one per original pattern, per original UNION
/// branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjunctiveQuery {
    pub projection: Vec<String>,
    pub body: Vec<Vec<DisjunctiveGroup>>,
}

impl DisjunctiveQuery {
    /// Number of conjunctive branches the equivalent UNION form has.
    pub fn expanded_branch_count(&self) -> usize {
        self.body
            .iter()
            .map(|groups| groups.iter().map(|g| g.alternatives.len()).product::<usize>())
            .sum()
    }
}
