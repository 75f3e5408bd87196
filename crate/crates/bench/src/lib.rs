//! Shared workload setup for the pipeline benchmarks.

use std::sync::Arc;

use intervalrdf_core::dataset::{encode_dataset, EncodeOptions, EncodedDataset};
use intervalrdf_core::hierarchy::{TBoxBuilder, TBoxEncoding};
use intervalrdf_core::materialize::{full_materialize, lite_materialize};
use intervalrdf_core::rdf::Triple;
use intervalrdf_testkit::{gen_mini_lubm, MiniLubmSpec};

pub struct Workload {
    pub abox: Vec<Triple>,
    pub tbox: Arc<TBoxEncoding>,
    pub raw: EncodedDataset,
    pub lite: EncodedDataset,
    pub full: EncodedDataset,
}

impl Workload {
    /// A synthetic university KB with `departments` departments per university.
    pub fn university(universities: usize, departments: usize, seed: u64) -> Self {
        let g = gen_mini_lubm(MiniLubmSpec::new(universities, departments, 10, 40, seed));
        let mut b = TBoxBuilder::new(g.axioms);
        b.discover(&g.abox);
        let tbox = Arc::new(b.build().expect("university schema encodes"));
        let raw = encode_dataset(&g.abox, tbox.clone(), &EncodeOptions::default()).expect("encodes");
        let (lite, _) = lite_materialize(&raw).expect("lite");
        let (full, _) = full_materialize(&raw).expect("full");
        Workload {
            abox: g.abox,
            tbox,
            raw,
            lite,
            full,
        }
    }
}
