use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;
use std::time::{Duration, Instant};

use indexmap::IndexSet;
use rayon::prelude::*;

use super::dictionary::IndividualDictionary;
use super::DatasetError;
use crate::hierarchy::{HierarchyKind, Id, TBoxEncoding};
use crate::rdf::vocab::RDF_TYPE;
use crate::rdf::{Term, Triple};

pub const DEFAULT_BROADCAST_THRESHOLD: usize = 1_000_000;

/// Which table an id belongs to. The same integer may be valid in all
/// three.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Namespace {
    Concept,
    Property,
    Individual,
}

impl Namespace {
    pub fn name(self) -> &'static str {
        match self {
            Namespace::Concept => "concept",
            Namespace::Property => "property",
            Namespace::Individual => "individual",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EncodingScheme {
    /// Predicates and type objects go through the TBox code tables.
    #[default]
    Obe,
    /// Every term is an opaque dictionary entry; the TBox is ignored.
    Sae,
}

impl EncodingScheme {
    pub fn name(self) -> &'static str {
        match self {
            EncodingScheme::Obe => "obe",
            EncodingScheme::Sae => "sae",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "obe" => Some(EncodingScheme::Obe),
            "sae" => Some(EncodingScheme::Sae),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JoinStrategy {
    Broadcast,
    Shuffle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EncodedTriple {
    pub s: Id,
    pub p: Id,
    pub o: Id,
}

impl EncodedTriple {
    pub fn new(s: Id, p: Id, o: Id) -> Self {
        Self { s, p, o }
    }
}

#[derive(Clone, Debug)]
pub struct EncodeOptions {
    pub partitions: usize,
    pub scheme: EncodingScheme,
    /// Term maps with fewer entries than this are replicated to every
    /// partition for the encoding join; larger ones are joined by shuffle.
    pub broadcast_threshold: usize,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            partitions: rayon::current_num_threads().max(1),
            scheme: EncodingScheme::Obe,
            broadcast_threshold: DEFAULT_BROADCAST_THRESHOLD,
        }
    }
}

impl EncodeOptions {
    pub fn with_partitions(partitions: usize) -> Self {
        Self {
            partitions,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct EncodeStats {
    pub input_triples: usize,
    pub output_triples: usize,
    pub distinct_terms: usize,
    /// Distinct new terms found by each dictionary partition.
    pub partition_counts: Vec<usize>,
    pub join: JoinStrategy,
    pub duration: Duration,
}

/// Immutable encoded ABox with the tables needed to decode it.
#[derive(Clone, Debug)]
pub struct EncodedDataset {
    tbox: Arc<TBoxEncoding>,
    individuals: Arc<IndividualDictionary>,
    partitions: Vec<Vec<EncodedTriple>>,
    scheme: EncodingScheme,
}

impl EncodedDataset {
    pub fn from_parts(
        tbox: Arc<TBoxEncoding>,
        individuals: Arc<IndividualDictionary>,
        partitions: Vec<Vec<EncodedTriple>>,
        scheme: EncodingScheme,
    ) -> Self {
        Self {
            tbox,
            individuals,
            partitions,
            scheme,
        }
    }

    pub fn tbox(&self) -> &Arc<TBoxEncoding> {
        &self.tbox
    }

    pub fn individuals(&self) -> &Arc<IndividualDictionary> {
        &self.individuals
    }

    pub fn partitions(&self) -> &[Vec<EncodedTriple>] {
        &self.partitions
    }

    pub fn scheme(&self) -> EncodingScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.partitions.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn triples(&self) -> impl Iterator<Item = &EncodedTriple> {
        self.partitions.iter().flatten()
    }

    /// All triples, sorted.
    pub fn sorted_triples(&self) -> Vec<EncodedTriple> {
        let mut all: Vec<_> = self.triples().copied().collect();
        all.sort_unstable();
        all
    }

    /// Fails unless the dataset was encoded against the TBox.
    pub fn require_obe(&self) -> Result<(), DatasetError> {
        match self.scheme {
            EncodingScheme::Obe => Ok(()),
            EncodingScheme::Sae => Err(DatasetError::RequiresOntologyEncoding),
        }
    }

    /// Namespace of the object of a triple with predicate `p`.
    pub fn object_namespace(&self, p: Id) -> Namespace {
        if self.scheme == EncodingScheme::Obe && p == self.tbox.type_id() {
            Namespace::Concept
        } else {
            Namespace::Individual
        }
    }

    fn table_for(&self, ns: Namespace) -> Option<HierarchyKind> {
        match (self.scheme, ns) {
            (EncodingScheme::Sae, _) | (_, Namespace::Individual) => None,
            (_, Namespace::Concept) => Some(HierarchyKind::Concept),
            (_, Namespace::Property) => Some(HierarchyKind::Property),
        }
    }

    /// Id of `term` in table `ns`. SAE datasets keep every term in the
    /// individual dictionary whatever `ns` says.
    pub fn locate(&self, term: &Term, ns: Namespace) -> Result<Id, DatasetError> {
        let found = match self.table_for(ns) {
            Some(kind) if term.is_iri() => self.tbox.table(kind).code_of(term.lexical()).map(|c| c.value),
            Some(_) => None,
            None => self.individuals.id_of(term),
        };
        found.ok_or_else(|| DatasetError::TermNotFound(term.to_string()))
    }

    pub fn extract(&self, id: Id, ns: Namespace) -> Result<Term, DatasetError> {
        let found = match self.table_for(ns) {
            Some(kind) => self.tbox.table(kind).label_of(id).map(Term::iri),
            None => self.individuals.term_of(id).cloned(),
        };
        found.ok_or(DatasetError::IdNotFound { id, namespace: ns })
    }

    pub fn decode_triple(&self, t: &EncodedTriple) -> Result<Triple, DatasetError> {
        Ok(Triple {
            s: self.extract(t.s, Namespace::Individual)?,
            p: self.extract(t.p, Namespace::Property)?,
            o: self.extract(t.o, self.object_namespace(t.p))?,
        })
    }
}

pub fn locate(term: &Term, ns: Namespace, ds: &EncodedDataset) -> Result<Id, DatasetError> {
    ds.locate(term, ns)
}

pub fn extract(id: Id, ns: Namespace, ds: &EncodedDataset) -> Result<Term, DatasetError> {
    ds.extract(id, ns)
}

/// Decodes every partition, in partition order.
pub fn decode_dataset(ds: &EncodedDataset) -> Result<Vec<Triple>, DatasetError> {
    let parts: Vec<Vec<Triple>> = ds
        .partitions
        .par_iter()
        .map(|part| part.iter().map(|t| ds.decode_triple(t)).collect())
        .collect::<Result<_, _>>()?;
    Ok(parts.into_iter().flatten().collect())
}

pub fn encode_dataset(
    triples: &[Triple],
    tbox: Arc<TBoxEncoding>,
    options: &EncodeOptions,
) -> Result<EncodedDataset, DatasetError> {
    encode_dataset_with_stats(triples, tbox, options).map(|(ds, _)| ds)
}

fn bucket_of<T: Hash + ?Sized>(x: &T, buckets: usize) -> usize {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    (h.finish() % buckets as u64) as usize
}

/// Splits `items` into `p` routed groups per source chunk and regroups them
/// by destination.
fn exchange<T: Send>(sources: Vec<Vec<Vec<T>>>, p: usize) -> Vec<Vec<T>> {
    let mut dest: Vec<Vec<T>> = (0..p).map(|_| Vec::new()).collect();
    for routed in sources {
        for (b, items) in routed.into_iter().enumerate() {
            dest[b].extend(items);
        }
    }
    dest
}

fn route<T, F: Fn(&T) -> usize>(items: impl IntoIterator<Item = T>, p: usize, key: F) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = (0..p).map(|_| Vec::new()).collect();
    for item in items {
        let b = key(&item);
        out[b].push(item);
    }
    out
}

/// Hash-partitions triples into `p` partitions on the whole triple, then
/// sorts and deduplicates each partition.
pub fn repartition_distinct(parts: Vec<Vec<EncodedTriple>>, p: usize) -> Vec<Vec<EncodedTriple>> {
    let p = p.max(1);
    exchange(parts.into_par_iter().map(|part| route(part, p, |t| bucket_of(t, p))).collect(), p)
        .into_par_iter()
        .map(|mut part| {
            part.sort_unstable();
            part.dedup();
            part
        })
        .collect()
}

/// Partition that owns individual `id` when grouping by individual.
pub fn individual_partition(id: Id, p: usize) -> usize {
    bucket_of(&id, p.max(1))
}

struct SchemaLookup<'a> {
    tbox: &'a TBoxEncoding,
    type_id: Id,
    scheme: EncodingScheme,
}

impl SchemaLookup<'_> {
    fn object_is_concept(&self, t: &Triple) -> bool {
        self.scheme == EncodingScheme::Obe && t.p.lexical() == RDF_TYPE
    }

    fn property(&self, p: &Term) -> Result<Id, DatasetError> {
        if p.lexical() == RDF_TYPE {
            return Ok(self.type_id);
        }
        self.tbox
            .properties()
            .code_of(p.lexical())
            .map(|c| c.value)
            .ok_or_else(|| DatasetError::UnknownSchemaTerm(p.lexical().to_string()))
    }

    fn concept(&self, o: &Term) -> Result<Id, DatasetError> {
        o.is_iri()
            .then(|| self.tbox.concepts().code_of(o.lexical()))
            .flatten()
            .map(|c| c.value)
            .ok_or_else(|| DatasetError::UnknownSchemaTerm(o.to_string()))
    }
}

/// The partitioned encoding pipeline:
///
/// 1. each input chunk routes its ABox terms to a dictionary partition by hash;
/// 2. each dictionary partition keeps the distinct terms in arrival order;
/// 3. an exclusive prefix sum over the per-partition counts gives the id base
///    of each partition, so ids are dense and disjoint;
/// 4. triples are joined with the term map, either broadcast or by
///    re-partitioning on subject then on object;
/// 5. encoded triples are hash-partitioned on the whole triple and deduplicated.
pub fn encode_dataset_with_stats(
    triples: &[Triple],
    tbox: Arc<TBoxEncoding>,
    options: &EncodeOptions,
) -> Result<(EncodedDataset, EncodeStats), DatasetError> {
    let p = options.partitions;
    if p == 0 {
        return Err(DatasetError::InvalidPartitions);
    }
    let started = Instant::now();
    let lookup = SchemaLookup {
        tbox: &tbox,
        type_id: tbox.type_id(),
        scheme: options.scheme,
    };
    let chunk = triples.len().div_ceil(p).max(1);
    let chunks: Vec<&[Triple]> = triples.chunks(chunk).collect();

    let routed: Vec<Vec<Vec<&Term>>> = chunks
        .par_iter()
        .map(|part| {
            let mut out: Vec<Vec<&Term>> = (0..p).map(|_| Vec::new()).collect();
            for t in part.iter() {
                out[bucket_of(&t.s, p)].push(&t.s);
                if options.scheme == EncodingScheme::Sae {
                    out[bucket_of(&t.p, p)].push(&t.p);
                }
                if !lookup.object_is_concept(t) {
                    out[bucket_of(&t.o, p)].push(&t.o);
                }
            }
            out
        })
        .collect();
    let buckets: Vec<IndexSet<&Term>> = exchange(routed, p)
        .into_par_iter()
        .map(|terms| terms.into_iter().collect())
        .collect();

    let partition_counts: Vec<usize> = buckets.iter().map(IndexSet::len).collect();
    let mut bases = Vec::with_capacity(p);
    let mut next: Id = 0;
    for count in &partition_counts {
        bases.push(next);
        next += *count as Id;
    }
    let distinct_terms = next as usize;
    let join = if distinct_terms < options.broadcast_threshold {
        JoinStrategy::Broadcast
    } else {
        JoinStrategy::Shuffle
    };

    let encoded: Vec<Vec<EncodedTriple>> = match join {
        JoinStrategy::Broadcast => {
            let map: HashMap<&Term, Id> = buckets
                .iter()
                .zip(&bases)
                .flat_map(|(set, base)| set.iter().enumerate().map(move |(i, t)| (*t, base + i as Id)))
                .collect();
            chunks
                .par_iter()
                .map(|part| {
                    part.iter()
                        .map(|t| {
                            let s = map[&t.s];
                            let (p_id, o) = if options.scheme == EncodingScheme::Sae {
                                (map[&t.p], map[&t.o])
                            } else if lookup.object_is_concept(t) {
                                (lookup.type_id, lookup.concept(&t.o)?)
                            } else {
                                (lookup.property(&t.p)?, map[&t.o])
                            };
                            Ok(EncodedTriple::new(s, p_id, o))
                        })
                        .collect::<Result<Vec<_>, DatasetError>>()
                })
                .collect::<Result<_, _>>()?
        }
        JoinStrategy::Shuffle => shuffle_join(&chunks, &buckets, &bases, &lookup, p)?,
    };

    let partitions = repartition_distinct(encoded, p);

    let terms: Vec<Term> = buckets.into_iter().flatten().cloned().collect();
    let individuals = IndividualDictionary::from_terms(terms).expect("hash partitions are disjoint");
    let ds = EncodedDataset::from_parts(tbox.clone(), Arc::new(individuals), partitions, options.scheme);
    let stats = EncodeStats {
        input_triples: triples.len(),
        output_triples: ds.len(),
        distinct_terms,
        partition_counts,
        join,
        duration: started.elapsed(),
    };
    Ok((ds, stats))
}

/// Partitioned hash join: the triples move to the dictionary partition of
/// their subject, then to that of their object. Only schema tables are
/// replicated.
fn shuffle_join(
    chunks: &[&[Triple]],
    buckets: &[IndexSet<&Term>],
    bases: &[Id],
    lookup: &SchemaLookup<'_>,
    p: usize,
) -> Result<Vec<Vec<EncodedTriple>>, DatasetError> {
    let sae = lookup.scheme == EncodingScheme::Sae;
    let local_id = |b: usize, t: &Term| -> Id {
        bases[b] + buckets[b].get_index_of(t).expect("every term was assigned") as Id
    };

    // (triple, subject id, predicate id)
    let by_subject: Vec<Vec<&Triple>> = exchange(
        chunks.par_iter().map(|c| route(c.iter(), p, |t| bucket_of(&t.s, p))).collect(),
        p,
    );
    let half: Vec<Vec<(&Triple, Id)>> = by_subject
        .into_par_iter()
        .enumerate()
        .map(|(b, part)| part.into_iter().map(|t| (t, local_id(b, &t.s))).collect())
        .collect();

    let by_predicate: Vec<Vec<(&Triple, Id, Id)>> = if sae {
        exchange(
            half.into_par_iter().map(|part| route(part, p, |(t, _)| bucket_of(&t.p, p))).collect(),
            p,
        )
        .into_par_iter()
        .enumerate()
        .map(|(b, part)| part.into_iter().map(|(t, s)| (t, s, local_id(b, &t.p))).collect())
        .collect()
    } else {
        half.into_par_iter()
            .map(|part| {
                part.into_iter()
                    .map(|(t, s)| Ok((t, s, lookup.property(&t.p)?)))
                    .collect::<Result<Vec<_>, DatasetError>>()
            })
            .collect::<Result<_, _>>()?
    };

    let by_object: Vec<Vec<(&Triple, Id, Id)>> = exchange(
        by_predicate
            .into_par_iter()
            .map(|part| route(part, p, |(t, _, _)| bucket_of(&t.o, p)))
            .collect(),
        p,
    );
    by_object
        .into_par_iter()
        .enumerate()
        .map(|(b, part)| {
            part.into_iter()
                .map(|(t, s, pid)| {
                    let o = if lookup.object_is_concept(t) {
                        lookup.concept(&t.o)?
                    } else {
                        local_id(b, &t.o)
                    };
                    Ok(EncodedTriple::new(s, pid, o))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::TBoxBuilder;
    use crate::rdf::SchemaAxiom;
    use std::collections::BTreeSet;

    const EX: &str = "http://example.org/";

    fn ex(s: &str) -> String {
        format!("{EX}{s}")
    }

    fn example_tbox() -> Arc<TBoxEncoding> {
        Arc::new(
            TBoxBuilder::new(vec![
                SchemaAxiom::sub_class(&ex("Professor"), &ex("FacultyMember")),
                SchemaAxiom::domain(&ex("teaches"), &ex("FacultyMember")),
            ])
            .build()
            .unwrap(),
        )
    }

    fn example_abox() -> Vec<Triple> {
        vec![
            Triple::iris(&ex("bernd"), RDF_TYPE, &ex("Professor")),
            Triple::iris(&ex("hubert"), &ex("teaches"), &ex("course1")),
        ]
    }

    fn as_set(ts: Vec<Triple>) -> BTreeSet<Triple> {
        ts.into_iter().collect()
    }

    #[test]
    fn example_abox_encodes() {
        let tbox = example_tbox();
        let ds = encode_dataset(&example_abox(), tbox.clone(), &EncodeOptions::with_partitions(2)).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.individuals().len(), 3);
        let prof = ds.locate(&Term::iri(ex("Professor")), Namespace::Concept).unwrap();
        assert_eq!(prof, tbox.concepts().code_of(&ex("Professor")).unwrap().value);
        let bernd = ds.locate(&Term::iri(ex("bernd")), Namespace::Individual).unwrap();
        assert!(ds.triples().any(|t| *t == EncodedTriple::new(bernd, tbox.type_id(), prof)));
        assert_eq!(as_set(decode_dataset(&ds).unwrap()), as_set(example_abox()));
    }

    #[test]
    fn locate_and_extract() {
        let ds = encode_dataset(&example_abox(), example_tbox(), &EncodeOptions::with_partitions(1)).unwrap();
        let type_term = Term::iri(RDF_TYPE);
        assert_eq!(ds.locate(&type_term, Namespace::Property).unwrap(), ds.tbox().type_id());
        assert!(matches!(
            ds.locate(&Term::iri(ex("nobody")), Namespace::Individual),
            Err(DatasetError::TermNotFound(_))
        ));
        assert_eq!(ds.extract(0, Namespace::Concept).unwrap(), Term::iri(crate::rdf::vocab::OWL_THING));
        for (id, term) in ds.individuals().iter() {
            assert_eq!(ds.locate(term, Namespace::Individual).unwrap(), id);
            assert_eq!(&ds.extract(id, Namespace::Individual).unwrap(), term);
        }
        assert!(matches!(
            ds.extract(99, Namespace::Individual),
            Err(DatasetError::IdNotFound { id: 99, .. })
        ));
    }

    #[test]
    fn empty_dataset() {
        let ds = encode_dataset(&[], example_tbox(), &EncodeOptions::with_partitions(4)).unwrap();
        assert!(ds.is_empty());
        assert!(ds.individuals().is_empty());
        assert_eq!(ds.partitions().len(), 4);
        assert!(decode_dataset(&ds).unwrap().is_empty());
    }

    #[test]
    fn duplicates_removed() {
        let mut triples = example_abox();
        triples.extend(example_abox());
        let ds = encode_dataset(&triples, example_tbox(), &EncodeOptions::with_partitions(3)).unwrap();
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn unknown_schema_term() {
        let t = vec![Triple::iris(&ex("a"), &ex("unencoded"), &ex("b"))];
        assert!(matches!(
            encode_dataset(&t, example_tbox(), &EncodeOptions::with_partitions(1)),
            Err(DatasetError::UnknownSchemaTerm(iri)) if iri == ex("unencoded")
        ));
        let t = vec![Triple::iris(&ex("a"), RDF_TYPE, &ex("Nope"))];
        assert!(matches!(
            encode_dataset(&t, example_tbox(), &EncodeOptions::with_partitions(1)),
            Err(DatasetError::UnknownSchemaTerm(_))
        ));
    }

    #[test]
    fn zero_partitions_rejected() {
        assert!(matches!(
            encode_dataset(&[], example_tbox(), &EncodeOptions::with_partitions(0)),
            Err(DatasetError::InvalidPartitions)
        ));
    }

    fn varied_abox() -> Vec<Triple> {
        let mut t = Vec::new();
        for i in 0..200 {
            t.push(Triple::iris(&ex(&format!("i{i}")), &ex("teaches"), &ex(&format!("c{}", i % 17))));
            t.push(Triple::iris(&ex(&format!("i{i}")), RDF_TYPE, &ex("Professor")));
            t.push(Triple::new(Term::blank(&format!("b{i}")), Term::iri(ex("teaches")), Term::string_literal("x")).unwrap());
        }
        t
    }

    #[test]
    fn join_strategies_agree() {
        let data = varied_abox();
        for scheme in [EncodingScheme::Obe, EncodingScheme::Sae] {
            let mut opts = EncodeOptions {
                partitions: 5,
                scheme,
                broadcast_threshold: usize::MAX,
            };
            let (a, sa) = encode_dataset_with_stats(&data, example_tbox(), &opts).unwrap();
            opts.broadcast_threshold = 0;
            let (b, sb) = encode_dataset_with_stats(&data, example_tbox(), &opts).unwrap();
            assert_eq!(sa.join, JoinStrategy::Broadcast);
            assert_eq!(sb.join, JoinStrategy::Shuffle);
            assert_eq!(a.sorted_triples(), b.sorted_triples());
            assert_eq!(as_set(decode_dataset(&b).unwrap()), as_set(data.clone()));
        }
    }

    #[test]
    fn ids_dense_and_disjoint_per_partition() {
        let (ds, stats) = encode_dataset_with_stats(&varied_abox(), example_tbox(), &EncodeOptions::with_partitions(7)).unwrap();
        assert_eq!(stats.partition_counts.iter().sum::<usize>(), ds.individuals().len());
        assert_eq!(stats.distinct_terms, ds.individuals().len());
        let used: BTreeSet<Id> = ds
            .triples()
            .flat_map(|t| [Some(t.s), (t.p != ds.tbox().type_id()).then_some(t.o)])
            .flatten()
            .collect();
        assert_eq!(used, (0..ds.individuals().len() as Id).collect());
    }

    #[test]
    fn sae_keeps_schema_terms_in_dictionary() {
        let opts = EncodeOptions {
            scheme: EncodingScheme::Sae,
            ..EncodeOptions::with_partitions(2)
        };
        let ds = encode_dataset(&example_abox(), example_tbox(), &opts).unwrap();
        assert_eq!(ds.individuals().len(), 6);
        assert!(ds.require_obe().is_err());
        assert!(ds.locate(&Term::iri(RDF_TYPE), Namespace::Property).is_ok());
        assert_eq!(as_set(decode_dataset(&ds).unwrap()), as_set(example_abox()));
    }

    #[test]
    fn partition_count_does_not_change_decoded_set() {
        let data = varied_abox();
        let decoded: Vec<BTreeSet<Triple>> = [1, 2, 16]
            .iter()
            .map(|&p| as_set(decode_dataset(&encode_dataset(&data, example_tbox(), &EncodeOptions::with_partitions(p)).unwrap()).unwrap()))
            .collect();
        assert!(decoded.windows(2).all(|w| w[0] == w[1]));
    }
}
