use super::term::Triple;
use super::vocab;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxiomKind {
    SubClassOf,
    SubPropertyOf,
    Domain,
    Range,
}

impl AxiomKind {
    pub fn from_predicate(iri: &str) -> Option<Self> {
        match iri {
            vocab::RDFS_SUBCLASS_OF => Some(AxiomKind::SubClassOf),
            vocab::RDFS_SUBPROPERTY_OF => Some(AxiomKind::SubPropertyOf),
            vocab::RDFS_DOMAIN => Some(AxiomKind::Domain),
            vocab::RDFS_RANGE => Some(AxiomKind::Range),
            _ => None,
        }
    }

    pub fn predicate(self) -> &'static str {
        match self {
            AxiomKind::SubClassOf => vocab::RDFS_SUBCLASS_OF,
            AxiomKind::SubPropertyOf => vocab::RDFS_SUBPROPERTY_OF,
            AxiomKind::Domain => vocab::RDFS_DOMAIN,
            AxiomKind::Range => vocab::RDFS_RANGE,
        }
    }
}

/// One of the four RDFS schema statements. Subject and object are IRIs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SchemaAxiom {
    pub kind: AxiomKind,
    pub subject: String,
    pub object: String,
}

impl SchemaAxiom {
    pub fn new(kind: AxiomKind, subject: impl Into<String>, object: impl Into<String>) -> Self {
        SchemaAxiom {
            kind,
            subject: subject.into(),
            object: object.into(),
        }
    }

    pub fn sub_class(sub: &str, sup: &str) -> Self {
        Self::new(AxiomKind::SubClassOf, sub, sup)
    }

    pub fn sub_property(sub: &str, sup: &str) -> Self {
        Self::new(AxiomKind::SubPropertyOf, sub, sup)
    }

    pub fn domain(property: &str, concept: &str) -> Self {
        Self::new(AxiomKind::Domain, property, concept)
    }

    pub fn range(property: &str, concept: &str) -> Self {
        Self::new(AxiomKind::Range, property, concept)
    }

    pub fn to_triple(&self) -> Triple {
        Triple::iris(&self.subject, self.kind.predicate(), &self.object)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid schema axiom `{triple}`: {reason}")]
pub struct InvalidAxiom {
    pub triple: String,
    pub reason: &'static str,
}

/// Picks out the schema statements from a triple sequence, in order.
/// Triples with any other predicate are ignored.
pub fn extract_schema<'a, I>(triples: I) -> Result<Vec<SchemaAxiom>, InvalidAxiom>
where
    I: IntoIterator<Item = &'a Triple>,
{
    let mut axioms = Vec::new();
    for t in triples {
        let Some(kind) = AxiomKind::from_predicate(t.p.lexical()) else {
            continue;
        };
        let reason = match (&t.s, &t.o) {
            (_, o) if o.is_literal() => Some("literal object"),
            (s, _) if !s.is_iri() => Some("subject must be an IRI"),
            (_, o) if !o.is_iri() => Some("object must be an IRI"),
            _ => None,
        };
        if let Some(reason) = reason {
            return Err(InvalidAxiom {
                triple: t.to_string(),
                reason,
            });
        }
        axioms.push(SchemaAxiom::new(kind, t.s.lexical(), t.o.lexical()));
    }
    Ok(axioms)
}

/// Convenience for building a schema triple list from axioms.
pub fn axioms_to_triples(axioms: &[SchemaAxiom]) -> Vec<Triple> {
    axioms.iter().map(SchemaAxiom::to_triple).collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::term::Term;
    use crate::rdf::vocab::*;

    #[test]
    fn picks_out_the_four_axiom_kinds() {
        let triples = vec![
            Triple::iris("Professor", RDFS_SUBCLASS_OF, "FacultyMember"),
            Triple::iris("bernd", RDF_TYPE, "Professor"),
            Triple::iris("teaches", RDFS_DOMAIN, "FacultyMember"),
            Triple::iris("worksFor", RDFS_SUBPROPERTY_OF, "memberOf"),
            Triple::iris("teaches", RDFS_RANGE, "Course"),
        ];
        let axioms = extract_schema(&triples).unwrap();
        assert_eq!(
            axioms,
            vec![
                SchemaAxiom::sub_class("Professor", "FacultyMember"),
                SchemaAxiom::domain("teaches", "FacultyMember"),
                SchemaAxiom::sub_property("worksFor", "memberOf"),
                SchemaAxiom::range("teaches", "Course"),
            ]
        );
        // idempotent through the triple form
        let again = extract_schema(&axioms_to_triples(&axioms)).unwrap();
        assert_eq!(again, axioms);
    }

    #[test]
    fn literal_object_is_invalid() {
        let t = Triple::new(Term::iri("p"), Term::iri(RDFS_RANGE), Term::string_literal("x")).unwrap();
        let err = extract_schema(&[t]).unwrap_err();
        assert_eq!(err.reason, "literal object");
    }
}
