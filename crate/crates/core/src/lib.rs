pub mod rdf;
pub mod hierarchy;
pub mod dataset;
pub mod materialize;
pub mod query;
