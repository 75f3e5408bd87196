//! RDF terms, N-Triples I/O and the RDFS schema subset.

pub mod ntriples;
pub mod schema;
pub mod term;
pub mod vocab;

pub use ntriples::{parse_ntriples, parse_ntriples_str, parse_term, serialize_ntriples, NTriplesReader, ParseError, ParseMode};
pub use schema::{extract_schema, AxiomKind, InvalidAxiom, SchemaAxiom};
pub use term::{Term, TermKind, Triple};
