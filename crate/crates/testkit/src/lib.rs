//! Reference oracles and data generators for testing `intervalrdf-core`.
//!
//! The oracles only borrow the core crate's data types (terms, triples,
//! axioms and the query syntax tree). Closure, entailment and matching are
//! reimplemented here naively.

pub mod closure;
pub mod fixtures;
pub mod lubm;
pub mod oracle;
pub mod random;

pub use closure::{ClosureOracle, Reachability};
pub use lubm::{gen_mini_lubm, mini_lubm_axioms, univ_bench_axioms, MiniLubm, MiniLubmSpec};
pub use oracle::{oracle_answer, oracle_entails};
pub use random::{gen_random_hierarchy, gen_random_kb, Branching, RandomHierarchy, RandomKb, RandomKbSpec};
