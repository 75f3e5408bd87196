use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::code::{Id, MAX_SUPPORTED_WIDTH};
use super::table::{assign_codes, CodeTable, HierarchyInput, HierarchyKind};
use super::HierarchyError;
use crate::rdf::vocab::RDF_TYPE;
use crate::rdf::{AxiomKind, SchemaAxiom, Triple};

pub const DEFAULT_MAX_WIDTH: u32 = 128;

/// Property id to the set of concept ids it implies.
pub type ConceptMap = BTreeMap<Id, BTreeSet<Id>>;

/// The encoded schema: both code tables and the domain/range maps.
///
/// Immutable once built; share it behind an `Arc`.
#[derive(Clone, Debug)]
pub struct TBoxEncoding {
    concepts: CodeTable,
    properties: CodeTable,
    domain: ConceptMap,
    range: ConceptMap,
    type_id: Id,
    concept_ancestors: HashMap<Id, Vec<Id>>,
    property_ancestors: HashMap<Id, Vec<Id>>,
    inherited_domain: HashMap<Id, Vec<Id>>,
    inherited_range: HashMap<Id, Vec<Id>>,
}

impl PartialEq for TBoxEncoding {
    fn eq(&self, other: &Self) -> bool {
        self.concepts == other.concepts
            && self.properties == other.properties
            && self.domain == other.domain
            && self.range == other.range
    }
}

impl TBoxEncoding {
    pub(crate) fn from_parts(
        concepts: CodeTable,
        properties: CodeTable,
        domain: ConceptMap,
        range: ConceptMap,
    ) -> Result<Self, HierarchyError> {
        let type_id = properties
            .code_of(RDF_TYPE)
            .ok_or_else(|| HierarchyError::Format("rdf:type is not encoded".into()))?
            .value;
        for (map, what) in [(&domain, "domain"), (&range, "range")] {
            for (p, cs) in map {
                if properties.code_by_value(*p).is_none() {
                    return Err(HierarchyError::Format(format!("{what} key {p} is not a property")));
                }
                if let Some(c) = cs.iter().find(|c| concepts.code_by_value(**c).is_none()) {
                    return Err(HierarchyError::Format(format!("{what} value {c} is not a concept")));
                }
            }
        }
        let ancestors = |t: &CodeTable| -> HashMap<Id, Vec<Id>> {
            t.entries()
                .iter()
                .map(|e| (e.code.value, t.proper_ancestors(e.code.value)))
                .collect()
        };
        let concept_ancestors = ancestors(&concepts);
        let property_ancestors = ancestors(&properties);
        let inherit = |map: &ConceptMap| -> HashMap<Id, Vec<Id>> {
            let mut out = HashMap::new();
            for e in properties.entries() {
                let p = e.code.value;
                let mut set = BTreeSet::new();
                for q in std::iter::once(&p).chain(&property_ancestors[&p]) {
                    if let Some(cs) = map.get(q) {
                        set.extend(cs.iter().copied());
                    }
                }
                if !set.is_empty() {
                    out.insert(p, set.into_iter().collect());
                }
            }
            out
        };
        let inherited_domain = inherit(&domain);
        let inherited_range = inherit(&range);
        Ok(TBoxEncoding {
            concepts,
            properties,
            domain,
            range,
            type_id,
            concept_ancestors,
            property_ancestors,
            inherited_domain,
            inherited_range,
        })
    }

    pub fn concepts(&self) -> &CodeTable {
        &self.concepts
    }

    pub fn properties(&self) -> &CodeTable {
        &self.properties
    }

    pub fn table(&self, kind: HierarchyKind) -> &CodeTable {
        match kind {
            HierarchyKind::Concept => &self.concepts,
            HierarchyKind::Property => &self.properties,
        }
    }

    /// Code value of `rdf:type`.
    pub fn type_id(&self) -> Id {
        self.type_id
    }

    pub fn domain_map(&self) -> &ConceptMap {
        &self.domain
    }

    pub fn range_map(&self) -> &ConceptMap {
        &self.range
    }

    /// Proper ancestors of a concept, excluding the root.
    pub fn concept_ancestors(&self, concept: Id) -> &[Id] {
        self.concept_ancestors.get(&concept).map_or(&[], Vec::as_slice)
    }

    /// Proper ancestors of a property, excluding the synthetic root.
    pub fn property_ancestors(&self, property: Id) -> &[Id] {
        self.property_ancestors.get(&property).map_or(&[], Vec::as_slice)
    }

    /// Domain concepts of `property` and of all its super-properties.
    pub fn inherited_domain(&self, property: Id) -> &[Id] {
        self.inherited_domain.get(&property).map_or(&[], Vec::as_slice)
    }

    /// Range concepts of `property` and of all its super-properties.
    pub fn inherited_range(&self, property: Id) -> &[Id] {
        self.inherited_range.get(&property).map_or(&[], Vec::as_slice)
    }

    /// Integer width needed to store any code of either table.
    pub fn max_code_length(&self) -> u32 {
        self.concepts.code_length().max(self.properties.code_length())
    }
}

/// Assembles a [`TBoxEncoding`] from schema axioms plus any schema terms
/// that only show up in the instance data.
#[derive(Clone, Debug)]
pub struct TBoxBuilder {
    axioms: Vec<SchemaAxiom>,
    concepts: HierarchyInput,
    properties: HierarchyInput,
    max_width: u32,
}

impl TBoxBuilder {
    pub fn new(axioms: Vec<SchemaAxiom>) -> Self {
        let mut concepts = HierarchyInput::new();
        let mut properties = HierarchyInput::new();
        for ax in &axioms {
            match ax.kind {
                AxiomKind::SubClassOf => concepts.add_edge(&ax.subject, &ax.object),
                AxiomKind::SubPropertyOf => properties.add_edge(&ax.subject, &ax.object),
                AxiomKind::Domain | AxiomKind::Range => {
                    properties.add_entity(&ax.subject);
                    concepts.add_entity(&ax.object);
                }
            }
        }
        properties.add_entity(RDF_TYPE);
        TBoxBuilder {
            axioms,
            concepts,
            properties,
            max_width: DEFAULT_MAX_WIDTH,
        }
    }

    pub fn max_width(mut self, bits: u32) -> Self {
        self.max_width = bits;
        self
    }

    /// Adds every predicate and every IRI `rdf:type` object that the schema
    /// does not mention. They become direct children of their root.
    pub fn discover<'a, I>(&mut self, triples: I)
    where
        I: IntoIterator<Item = &'a Triple>,
    {
        for t in triples {
            self.properties.add_entity(t.p.lexical());
            if t.p.lexical() == RDF_TYPE && t.o.is_iri() {
                self.concepts.add_entity(t.o.lexical());
            }
        }
    }

    pub fn build(self) -> Result<TBoxEncoding, HierarchyError> {
        if !(2..=MAX_SUPPORTED_WIDTH).contains(&self.max_width) {
            return Err(HierarchyError::UnsupportedWidth(self.max_width));
        }
        for ax in &self.axioms {
            let reserved = match ax.kind {
                AxiomKind::SubPropertyOf => ax.subject == RDF_TYPE || ax.object == RDF_TYPE,
                AxiomKind::Domain | AxiomKind::Range => ax.subject == RDF_TYPE,
                AxiomKind::SubClassOf => false,
            };
            if reserved {
                let what = match ax.kind {
                    AxiomKind::SubPropertyOf => "subPropertyOf",
                    AxiomKind::Domain => "domain",
                    _ => "range",
                };
                return Err(HierarchyError::ReservedProperty(what));
            }
        }
        let concepts = assign_codes(&self.concepts, HierarchyKind::Concept, self.max_width)?;
        let properties = assign_codes(&self.properties, HierarchyKind::Property, self.max_width)?;
        let (domain, range) = build_domain_range_maps(&self.axioms, &properties, &concepts)?;
        TBoxEncoding::from_parts(concepts, properties, domain, range)
    }
}

/// Key/value structures for the domain and range axioms: property id to
/// the set of concept ids. Properties without such axioms are absent.
pub fn build_domain_range_maps(
    axioms: &[SchemaAxiom],
    properties: &CodeTable,
    concepts: &CodeTable,
) -> Result<(ConceptMap, ConceptMap), HierarchyError> {
    let mut domain = ConceptMap::new();
    let mut range = ConceptMap::new();
    for ax in axioms {
        let map = match ax.kind {
            AxiomKind::Domain => &mut domain,
            AxiomKind::Range => &mut range,
            _ => continue,
        };
        let p = properties
            .code_of(&ax.subject)
            .ok_or_else(|| HierarchyError::UnknownEntity(ax.subject.clone()))?;
        let c = concepts
            .code_of(&ax.object)
            .ok_or_else(|| HierarchyError::UnknownEntity(ax.object.clone()))?;
        map.entry(p.value).or_default().insert(c.value);
    }
    Ok((domain, range))
}
