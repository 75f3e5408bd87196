//! Interval-compatible codes for the concept and property hierarchies.
//!
//! Every entity gets a left-aligned bit vector whose prefix is its parent's
//! code. The descendants of an entity `c` are then exactly the codes in
//! `[c.value, bound(c))`, so a subsumption test is two integer
//! comparisons. Hierarchies that are not trees keep the few closure pairs
//! the spanning tree misses in a residual side table.

mod code;
mod format;
mod table;
mod tbox;

pub use code::{bound, segment_bits, EntityCode, Id, MAX_SUPPORTED_WIDTH};
pub use format::{load_tbox, serialize_tbox, serialize_tbox_string};
pub use table::{assign_codes, CodeEntry, CodeTable, HierarchyInput, HierarchyKind};
pub use tbox::{build_domain_range_maps, ConceptMap, TBoxBuilder, TBoxEncoding, DEFAULT_MAX_WIDTH};

#[derive(Debug, thiserror::Error)]
pub enum HierarchyError {
    #[error("the {} hierarchy has no entities", .0.name())]
    EmptyHierarchy(HierarchyKind),
    #[error("{} codes need at least {required} bits, more than the configured maximum of {max}", kind.name())]
    WidthOverflow {
        kind: HierarchyKind,
        required: u32,
        max: u32,
    },
    #[error("maximum code width must be between 2 and {MAX_SUPPORTED_WIDTH}, got {0}")]
    UnsupportedWidth(u32),
    #[error("root {root} cannot be subsumed by {sup}")]
    RootHasSuper { root: String, sup: String },
    #[error("axiom references un-encoded entity {0}")]
    UnknownEntity(String),
    #[error("rdf:type cannot take part in {0} axioms")]
    ReservedProperty(&'static str),
    #[error("malformed tbox encoding: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
