use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use rayon::prelude::*;

use super::msc::msc;
use super::{MaterializationMode, MaterializationReport, MaterializeError};
use crate::dataset::{individual_partition, EncodedDataset, EncodedTriple};
use crate::hierarchy::Id;

/// Types attached to one individual before reduction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeProfile {
    pub individual: Id,
    pub explicit_types: BTreeSet<Id>,
    pub implicit_types: BTreeSet<Id>,
}

/// One grouping key and one candidate type.
type Candidate = (Id, Id, bool);

fn candidates(part: &[EncodedTriple], ds: &EncodedDataset, p: usize) -> (Vec<EncodedTriple>, Vec<Vec<Candidate>>) {
    let tbox = ds.tbox();
    let dict = ds.individuals();
    let type_id = tbox.type_id();
    let mut kept = Vec::new();
    let mut routed: Vec<Vec<Candidate>> = (0..p).map(|_| Vec::new()).collect();
    for t in part {
        if t.p == type_id {
            routed[individual_partition(t.s, p)].push((t.s, t.o, true));
            continue;
        }
        kept.push(*t);
        if tbox.inherited_domain(t.p).is_empty() && tbox.inherited_range(t.p).is_empty() {
            continue;
        }
        for &c in tbox.inherited_domain(t.p) {
            routed[individual_partition(t.s, p)].push((t.s, c, false));
        }
        if !dict.term_of(t.o).is_some_and(|o| o.is_literal()) {
            for &c in tbox.inherited_range(t.p) {
                routed[individual_partition(t.o, p)].push((t.o, c, false));
            }
        }
    }
    (kept, routed)
}

/// Builds the type profile of every individual that has either an
/// explicit type or a domain/range-derived one.
pub fn type_profiles(ds: &EncodedDataset) -> Vec<TypeProfile> {
    let p = ds.partitions().len().max(1);
    let groups = group(ds, p).1;
    let mut out: Vec<TypeProfile> = groups.into_iter().flatten().collect();
    out.sort_unstable_by_key(|t| t.individual);
    out
}

fn group(ds: &EncodedDataset, p: usize) -> (Vec<Vec<EncodedTriple>>, Vec<Vec<TypeProfile>>) {
    let (kept, routed): (Vec<_>, Vec<_>) = ds.partitions().par_iter().map(|part| candidates(part, ds, p)).unzip();
    let mut by_dest: Vec<Vec<Candidate>> = (0..p).map(|_| Vec::new()).collect();
    for r in routed {
        for (b, items) in r.into_iter().enumerate() {
            by_dest[b].extend(items);
        }
    }
    let profiles = by_dest
        .into_par_iter()
        .map(|items| {
            let mut map: HashMap<Id, TypeProfile> = HashMap::new();
            for (i, c, explicit) in items {
                let prof = map.entry(i).or_insert_with(|| TypeProfile {
                    individual: i,
                    ..TypeProfile::default()
                });
                if explicit {
                    prof.explicit_types.insert(c);
                } else {
                    prof.implicit_types.insert(c);
                }
            }
            let mut v: Vec<TypeProfile> = map.into_values().collect();
            v.sort_unstable_by_key(|t| t.individual);
            v
        })
        .collect();
    (kept, profiles)
}

/// Replaces every individual's types by the most specific concepts of its
/// explicit and domain/range-derived types. Other triples are untouched.
pub fn lite_materialize(ds: &EncodedDataset) -> Result<(EncodedDataset, MaterializationReport), MaterializeError> {
    ds.require_obe()?;
    let started = Instant::now();
    let p = ds.partitions().len().max(1);
    let type_id = ds.tbox().type_id();
    let (kept, profiles) = group(ds, p);
    let reduced: Vec<(Vec<EncodedTriple>, usize, usize)> = profiles
        .into_par_iter()
        .map(|profs| {
            let mut out = Vec::new();
            let (mut added, mut deleted) = (0, 0);
            for prof in profs {
                let all: Vec<Id> = prof.explicit_types.union(&prof.implicit_types).copied().collect();
                let kept_types = msc(&all, ds.tbox())?;
                added += kept_types.iter().filter(|c| !prof.explicit_types.contains(c)).count();
                deleted += prof.explicit_types.iter().filter(|c| kept_types.binary_search(c).is_err()).count();
                out.extend(kept_types.into_iter().map(|c| EncodedTriple::new(prof.individual, type_id, c)));
            }
            Ok((out, added, deleted))
        })
        .collect::<Result<_, MaterializeError>>()?;

    let mut partitions: Vec<Vec<EncodedTriple>> = kept;
    partitions.resize_with(p, Vec::new);
    let (mut added, mut deleted) = (0, 0);
    for (b, (types, a, d)) in reduced.into_iter().enumerate() {
        partitions[b].extend(types);
        added += a;
        deleted += d;
    }
    partitions.par_iter_mut().for_each(|part| part.sort_unstable());
    let out = EncodedDataset::from_parts(ds.tbox().clone(), ds.individuals().clone(), partitions, ds.scheme());
    let report = MaterializationReport {
        mode: MaterializationMode::Lite,
        input_triples: ds.len(),
        output_triples: out.len(),
        added,
        deleted,
        duration: started.elapsed(),
    };
    Ok((out, report))
}
