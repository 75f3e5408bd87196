use std::time::Instant;

use rayon::prelude::*;

use super::{MaterializationMode, MaterializationReport, MaterializeError};
use crate::dataset::{repartition_distinct, EncodedDataset, EncodedTriple};

/// RDFS closure of the dataset, computed in three passes: subproperty
/// closure, then domain/range typing, then subclass closure. With no
/// superproperty of `rdf:type` this order reaches the fixpoint. Literal
/// objects are never typed.
pub fn full_materialize(ds: &EncodedDataset) -> Result<(EncodedDataset, MaterializationReport), MaterializeError> {
    ds.require_obe()?;
    let started = Instant::now();
    let tbox = ds.tbox();
    let dict = ds.individuals();
    let type_id = tbox.type_id();

    let with_superproperties: Vec<Vec<EncodedTriple>> = ds
        .partitions()
        .par_iter()
        .map(|part| {
            let mut out = Vec::with_capacity(part.len());
            for t in part {
                out.push(*t);
                if t.p != type_id {
                    out.extend(tbox.property_ancestors(t.p).iter().map(|&q| EncodedTriple::new(t.s, q, t.o)));
                }
            }
            out
        })
        .collect();

    let with_domain_range: Vec<Vec<EncodedTriple>> = with_superproperties
        .into_par_iter()
        .map(|part| {
            let mut out = Vec::with_capacity(part.len());
            for t in &part {
                if t.p == type_id {
                    continue;
                }
                if let Some(cs) = tbox.domain_map().get(&t.p) {
                    out.extend(cs.iter().map(|&c| EncodedTriple::new(t.s, type_id, c)));
                }
                if let Some(cs) = tbox.range_map().get(&t.p) {
                    if !dict.term_of(t.o).is_some_and(|o| o.is_literal()) {
                        out.extend(cs.iter().map(|&c| EncodedTriple::new(t.o, type_id, c)));
                    }
                }
            }
            let mut part = part;
            part.extend(out);
            part
        })
        .collect();

    let closed: Vec<Vec<EncodedTriple>> = with_domain_range
        .into_par_iter()
        .map(|part| {
            let mut out = Vec::with_capacity(part.len());
            for t in part {
                out.push(t);
                if t.p == type_id {
                    out.extend(tbox.concept_ancestors(t.o).iter().map(|&c| EncodedTriple::new(t.s, type_id, c)));
                }
            }
            out
        })
        .collect();

    let partitions = repartition_distinct(closed, ds.partitions().len());
    let out = EncodedDataset::from_parts(tbox.clone(), dict.clone(), partitions, ds.scheme());
    let report = MaterializationReport {
        mode: MaterializationMode::Full,
        input_triples: ds.len(),
        output_triples: out.len(),
        added: out.len() - ds.len(),
        deleted: 0,
        duration: started.elapsed(),
    };
    Ok((out, report))
}
