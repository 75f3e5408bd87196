//! ABox dictionary encoding over hash partitions, plus the dataset files.

mod dictionary;
mod encode;
mod store;

pub use dictionary::IndividualDictionary;
pub use encode::{
    decode_dataset, encode_dataset, encode_dataset_with_stats, extract, locate, EncodeOptions, EncodeStats,
    EncodedDataset, EncodedTriple, EncodingScheme, JoinStrategy, Namespace, DEFAULT_BROADCAST_THRESHOLD,
    individual_partition, repartition_distinct,
};
pub use store::{read_dataset, record_width_bits, write_dataset, MANIFEST};

use crate::hierarchy::{HierarchyError, Id};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("term {0} has no code in the TBox encoding")]
    UnknownSchemaTerm(String),
    #[error("term {0} not found")]
    TermNotFound(String),
    #[error("id {id} not found in the {} table", namespace.name())]
    IdNotFound { id: Id, namespace: Namespace },
    #[error("partition count must be at least 1")]
    InvalidPartitions,
    #[error("this operation needs an ontology-based (obe) encoding")]
    RequiresOntologyEncoding,
    #[error("malformed dataset: {0}")]
    Format(String),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
