//! The two-professor knowledge base used throughout the docs.

use intervalrdf_core::rdf::vocab::RDF_TYPE;
use intervalrdf_core::rdf::{SchemaAxiom, Triple};

pub const EX: &str = "http://example.org/";

pub fn ex(local: &str) -> String {
    format!("{EX}{local}")
}

/// `Professor ⊑ FacultyMember` and `teaches` has domain FacultyMember.
pub fn example1_axioms() -> Vec<SchemaAxiom> {
    vec![
        SchemaAxiom::sub_class(&ex("Professor"), &ex("FacultyMember")),
        SchemaAxiom::domain(&ex("teaches"), &ex("FacultyMember")),
    ]
}

pub fn example1_abox() -> Vec<Triple> {
    vec![
        Triple::iris(&ex("bernd"), RDF_TYPE, &ex("Professor")),
        Triple::iris(&ex("hubert"), &ex("teaches"), &ex("course1")),
    ]
}
