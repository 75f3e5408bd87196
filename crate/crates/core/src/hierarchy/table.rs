//! Code tables and the top-down code assignment.

use std::collections::{BTreeMap, HashMap, HashSet};

use indexmap::IndexSet;
use petgraph::graph::{DiGraph, NodeIndex};

use super::code::{segment_bits, EntityCode, Id};
use super::HierarchyError;
use crate::rdf::vocab;
use crate::rdf::{AxiomKind, SchemaAxiom};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HierarchyKind {
    Concept,
    Property,
}

impl HierarchyKind {
    pub fn root_iri(self) -> &'static str {
        match self {
            HierarchyKind::Concept => vocab::OWL_THING,
            HierarchyKind::Property => vocab::TOP_PROPERTY,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HierarchyKind::Concept => "concept",
            HierarchyKind::Property => "property",
        }
    }

    fn subsumption_axiom(self) -> AxiomKind {
        match self {
            HierarchyKind::Concept => AxiomKind::SubClassOf,
            HierarchyKind::Property => AxiomKind::SubPropertyOf,
        }
    }
}

/// Entities and direct subsumption edges of one hierarchy, in declaration
/// order.
#[derive(Clone, Debug, Default)]
pub struct HierarchyInput {
    entities: IndexSet<String>,
    edges: Vec<(String, String)>,
}

impl HierarchyInput {
    pub fn new() -> Self {
        Self::default()
    }

    /// Collects the subsumption axioms of `kind`. Entities are numbered by
    /// their first mention.
    pub fn from_axioms(axioms: &[SchemaAxiom], kind: HierarchyKind) -> Self {
        let mut input = Self::new();
        for ax in axioms.iter().filter(|a| a.kind == kind.subsumption_axiom()) {
            input.add_edge(&ax.subject, &ax.object);
        }
        input
    }

    pub fn add_entity(&mut self, iri: &str) {
        if !self.entities.contains(iri) {
            self.entities.insert(iri.to_string());
        }
    }

    /// Declares `sub ⊑ sup`.
    pub fn add_edge(&mut self, sub: &str, sup: &str) {
        self.add_entity(sub);
        self.add_entity(sup);
        self.edges.push((sub.to_string(), sup.to_string()));
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }
}

/// One encoded entity. Several IRIs share an entry when their subsumption
/// axioms form a cycle; the first declared one is the representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeEntry {
    pub code: EntityCode,
    pub labels: Vec<String>,
}

impl CodeEntry {
    pub fn label(&self) -> &str {
        &self.labels[0]
    }
}

/// Codes of one hierarchy plus the subsumption pairs that the tree
/// intervals do not capture.
#[derive(Clone, Debug)]
pub struct CodeTable {
    kind: HierarchyKind,
    code_length: u32,
    entries: Vec<CodeEntry>,
    by_label: HashMap<String, usize>,
    by_value: BTreeMap<Id, usize>,
    residual: HashSet<(Id, Id)>,
    residual_desc: HashMap<Id, Vec<Id>>,
    residual_anc: HashMap<Id, Vec<Id>>,
}

impl PartialEq for CodeTable {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.code_length == other.code_length
            && self.entries == other.entries
            && self.residual == other.residual
    }
}

impl CodeTable {
    /// Assembles a table from already-assigned entries. Entries must be in
    /// top-down order with the root first.
    pub(crate) fn from_parts(
        kind: HierarchyKind,
        code_length: u32,
        entries: Vec<CodeEntry>,
        residual: HashSet<(Id, Id)>,
    ) -> Result<Self, HierarchyError> {
        let mut by_label = HashMap::new();
        let mut by_value = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            if by_value.insert(e.code.value, i).is_some() {
                return Err(HierarchyError::Format(format!(
                    "duplicate {} code {}",
                    kind.name(),
                    e.code.value
                )));
            }
            for l in &e.labels {
                if by_label.insert(l.clone(), i).is_some() {
                    return Err(HierarchyError::Format(format!("duplicate label {l}")));
                }
            }
        }
        let mut residual_desc: HashMap<Id, Vec<Id>> = HashMap::new();
        let mut residual_anc: HashMap<Id, Vec<Id>> = HashMap::new();
        let mut sorted: Vec<_> = residual.iter().copied().collect();
        sorted.sort_unstable();
        for (d, a) in sorted {
            if !by_value.contains_key(&d) || !by_value.contains_key(&a) {
                return Err(HierarchyError::Format(format!(
                    "residual pair ({d}, {a}) references an unknown code"
                )));
            }
            residual_desc.entry(a).or_default().push(d);
            residual_anc.entry(d).or_default().push(a);
        }
        Ok(CodeTable {
            kind,
            code_length,
            entries,
            by_label,
            by_value,
            residual,
            residual_desc,
            residual_anc,
        })
    }

    pub fn kind(&self) -> HierarchyKind {
        self.kind
    }

    pub fn code_length(&self) -> u32 {
        self.code_length
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in assignment (top-down) order.
    pub fn entries(&self) -> &[CodeEntry] {
        &self.entries
    }

    pub fn root(&self) -> &CodeEntry {
        &self.entries[0]
    }

    pub fn code_of(&self, iri: &str) -> Option<&EntityCode> {
        self.by_label.get(iri).map(|&i| &self.entries[i].code)
    }

    pub fn entry_by_value(&self, value: Id) -> Option<&CodeEntry> {
        self.by_value.get(&value).map(|&i| &self.entries[i])
    }

    pub fn code_by_value(&self, value: Id) -> Option<&EntityCode> {
        self.entry_by_value(value).map(|e| &e.code)
    }

    pub fn label_of(&self, value: Id) -> Option<&str> {
        self.entry_by_value(value).map(CodeEntry::label)
    }

    pub fn residual_pairs(&self) -> &HashSet<(Id, Id)> {
        &self.residual
    }

    /// Residual descendants of `ancestor`, i.e. entities below it that the
    /// interval misses.
    pub fn residual_descendants(&self, ancestor: Id) -> &[Id] {
        self.residual_desc.get(&ancestor).map_or(&[], Vec::as_slice)
    }

    /// Subsumption test: interval membership, widened by the residual pairs.
    #[inline]
    pub fn is_descendant_or_self(&self, b: Id, c: &EntityCode) -> bool {
        c.contains(b) || (!self.residual.is_empty() && self.residual.contains(&(b, c.value)))
    }

    /// Every encoded entity subsumed by `value`, itself included.
    pub fn descendants_or_self(&self, value: Id) -> Vec<Id> {
        let Some(code) = self.code_by_value(value) else {
            return Vec::new();
        };
        let mut out: Vec<Id> = self.by_value.range(code.value..code.bound()).map(|(&v, _)| v).collect();
        out.extend_from_slice(self.residual_descendants(value));
        out
    }

    /// Strict ancestors of `value` other than the root: its tree ancestors
    /// plus its residual ancestors.
    pub fn proper_ancestors(&self, value: Id) -> Vec<Id> {
        let mut out = Vec::new();
        let Some(mut code) = self.code_by_value(value).copied() else {
            return out;
        };
        while let Some(parent) = code.parent_value() {
            let Some(parent_code) = self.code_by_value(parent) else {
                break;
            };
            if parent_code.start == 0 {
                break;
            }
            out.push(parent);
            code = *parent_code;
        }
        if let Some(extra) = self.residual_anc.get(&value) {
            let root = self.root().code.value;
            out.extend(extra.iter().filter(|&&a| a != root));
        }
        out
    }
}

/// Encodes one hierarchy top-down.
///
/// The subsumption edges are first condensed (cycles denote equivalent
/// entities and share a code). Each entity's canonical parent is the target
/// of its first declared edge; entities without one hang under the root. The
/// `N` children of an entity get local values `1..=N` in declaration order
/// over `ceil(log2(N + 1))` bits, appended after the parent's prefix. Every
/// closure pair not witnessed by the resulting tree is kept as a residual
/// pair.
pub fn assign_codes(
    input: &HierarchyInput,
    kind: HierarchyKind,
    max_width: u32,
) -> Result<CodeTable, HierarchyError> {
    if input.entities.is_empty() {
        return Err(HierarchyError::EmptyHierarchy(kind));
    }
    let root_iri = kind.root_iri();
    let mut entities: IndexSet<&str> = IndexSet::with_capacity(input.entities.len() + 1);
    entities.insert(root_iri);
    entities.extend(input.entities.iter().map(String::as_str));
    let n = entities.len();

    let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(n, input.edges.len());
    for _ in 0..n {
        graph.add_node(());
    }
    let index = |iri: &str| entities.get_index_of(iri).expect("entity was interned");
    let mut edges = Vec::with_capacity(input.edges.len());
    for (sub, sup) in &input.edges {
        let (s, o) = (index(sub), index(sup));
        if s != o {
            graph.add_edge(NodeIndex::new(s), NodeIndex::new(o), ());
            edges.push((s, o));
        }
    }

    // Condense cycles. Components are renumbered by their first-declared
    // member so that ordering follows the input.
    let sccs = petgraph::algo::tarjan_scc(&graph);
    let mut comp_of = vec![0usize; n];
    let mut comps: Vec<Vec<usize>> = sccs
        .into_iter()
        .map(|mut members| {
            let mut m: Vec<usize> = members.drain(..).map(NodeIndex::index).collect();
            m.sort_unstable();
            m
        })
        .collect();
    comps.sort_unstable_by_key(|m| m[0]);
    for (c, members) in comps.iter().enumerate() {
        for &m in members {
            comp_of[m] = c;
        }
    }
    let root = comp_of[0];
    debug_assert_eq!(root, 0);

    let nc = comps.len();
    let mut supers: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for &(s, o) in &edges {
        let (cs, co) = (comp_of[s], comp_of[o]);
        if cs != co && !supers[cs].contains(&co) {
            supers[cs].push(co);
        }
    }
    if let Some(&sup) = supers[root].first() {
        return Err(HierarchyError::RootHasSuper {
            root: root_iri.to_string(),
            sup: entities[comps[sup][0]].to_string(),
        });
    }

    let mut parent = vec![usize::MAX; nc];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for c in 0..nc {
        if c == root {
            continue;
        }
        let p = supers[c].first().copied().unwrap_or(root);
        parent[c] = p;
        children[p].push(c);
    }
    // Components are numbered in declaration order already.
    for list in &mut children {
        list.sort_unstable();
    }

    // Phase one: prefixes, top-down.
    let mut prefix = vec![0 as Id; nc];
    let mut placement = vec![(0u32, 0u32); nc];
    placement[root] = (0, 1);
    let mut order = Vec::with_capacity(nc);
    order.push(root);
    let mut head = 0;
    let mut code_length = 1;
    while head < order.len() {
        let e = order[head];
        head += 1;
        let kids = &children[e];
        if kids.is_empty() {
            continue;
        }
        let bits = segment_bits(kids.len());
        let (start, local) = placement[e];
        let child_start = start + local;
        let width = child_start + bits;
        if width > max_width {
            return Err(HierarchyError::WidthOverflow {
                kind,
                required: width,
                max: max_width,
            });
        }
        code_length = code_length.max(width);
        for (k, &child) in kids.iter().enumerate() {
            prefix[child] = (prefix[e] << bits) | (k as Id + 1);
            placement[child] = (child_start, bits);
            order.push(child);
        }
    }
    debug_assert_eq!(order.len(), nc, "every component hangs under the root");

    // Phase two: left-align and pad with zeros.
    let value_of = |c: usize| {
        let (start, local) = placement[c];
        prefix[c] << (code_length - start - local)
    };
    let entries: Vec<CodeEntry> = order
        .iter()
        .map(|&c| {
            let (start, local_length) = placement[c];
            CodeEntry {
                code: EntityCode {
                    value: value_of(c),
                    start,
                    local_length,
                    code_length,
                },
                labels: comps[c].iter().map(|&m| entities[m].to_string()).collect(),
            }
        })
        .collect();

    // Closure pairs not witnessed by the tree.
    let mut residual = HashSet::new();
    let mut ancestors: Vec<Option<Vec<usize>>> = vec![None; nc];
    for &c in order.iter().rev() {
        closure_of(c, &supers, &mut ancestors);
    }
    for c in 0..nc {
        let mut tree_anc = HashSet::new();
        let mut p = parent[c];
        while p != usize::MAX {
            tree_anc.insert(p);
            p = parent[p];
        }
        for &a in ancestors[c].as_ref().expect("closure computed") {
            if !tree_anc.contains(&a) {
                residual.insert((value_of(c), value_of(a)));
            }
        }
    }

    CodeTable::from_parts(kind, code_length, entries, residual)
}

/// Strict ancestors of component `c` over the declared edges, memoised.
fn closure_of(c: usize, supers: &[Vec<usize>], memo: &mut [Option<Vec<usize>>]) {
    if memo[c].is_some() {
        return;
    }
    // Iterative post-order so deep hierarchies do not exhaust the stack.
    let mut stack = vec![(c, 0usize)];
    while let Some(&mut (node, ref mut next)) = stack.last_mut() {
        if let Some(&sup) = supers[node].get(*next) {
            *next += 1;
            if memo[sup].is_none() {
                stack.push((sup, 0));
            }
            continue;
        }
        let mut set: IndexSet<usize> = IndexSet::new();
        for &sup in &supers[node] {
            set.insert(sup);
            set.extend(memo[sup].as_ref().expect("visited").iter().copied());
        }
        memo[node] = Some(set.into_iter().collect());
        stack.pop();
    }
}
