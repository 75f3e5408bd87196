use intervalrdf_core::hierarchy::{HierarchyInput, HierarchyKind};
use intervalrdf_core::rdf::vocab::RDF_TYPE;
use intervalrdf_core::rdf::{SchemaAxiom, Term, Triple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of children drawn uniformly from `min..=max` for every expanded
/// node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Branching {
    pub min: usize,
    pub max: usize,
}

impl Branching {
    pub fn new(min: usize, max: usize) -> Self {
        assert!(min <= max && max >= 1);
        Branching { min, max }
    }
}

/// A random hierarchy over `nodes`; node 0 is the root. Edges are
/// `(sub, sup)` by index, tree edges first.
#[derive(Clone, Debug)]
pub struct RandomHierarchy {
    pub nodes: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    pub tree_edges: usize,
}

impl RandomHierarchy {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn axioms(&self) -> Vec<SchemaAxiom> {
        self.edges
            .iter()
            .map(|&(a, b)| SchemaAxiom::sub_class(&self.nodes[a], &self.nodes[b]))
            .collect()
    }

    /// Encoder input: the root first, then every edge in order.
    pub fn input(&self) -> HierarchyInput {
        let mut input = HierarchyInput::new();
        input.add_entity(&self.nodes[0]);
        for &(a, b) in &self.edges {
            input.add_edge(&self.nodes[a], &self.nodes[b]);
        }
        input
    }
}

/// Breadth-first random tree of `n` nodes rooted at the `kind` root, plus,
/// for each non-root node and with probability `dag_probability`, one extra
/// parent among the nodes created before it. Extra parents never close a
/// cycle.
pub fn gen_random_hierarchy(
    n: usize,
    kind: HierarchyKind,
    branching: Branching,
    dag_probability: f64,
    seed: u64,
) -> RandomHierarchy {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = vec![kind.root_iri().to_string()];
    let mut parent = vec![usize::MAX];
    let mut frontier = std::collections::VecDeque::from([0usize]);
    while nodes.len() < n {
        let at = frontier.pop_front().unwrap_or_else(|| rng.gen_range(0..nodes.len()));
        let mut k = rng.gen_range(branching.min..=branching.max);
        if k == 0 && frontier.is_empty() {
            k = 1;
        }
        for _ in 0..k {
            if nodes.len() == n {
                break;
            }
            let id = nodes.len();
            nodes.push(format!("http://example.org/h/N{id}"));
            parent.push(at);
            frontier.push_back(id);
        }
    }
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i, parent[i])).collect();
    let tree_edges = edges.len();
    for i in 2..n {
        if rng.gen_bool(dag_probability) {
            let j = rng.gen_range(1..i);
            if j != parent[i] {
                edges.push((i, j));
            }
        }
    }
    RandomHierarchy {
        nodes,
        edges,
        tree_edges,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RandomKbSpec {
    pub concepts: usize,
    pub properties: usize,
    pub individuals: usize,
    pub triples: usize,
    /// Share of ABox triples that are `rdf:type` assertions.
    pub type_fraction: f64,
    /// Share of the other triples whose object is a literal.
    pub literal_fraction: f64,
    pub dag_probability: f64,
    /// Chance that a property gets a domain, and separately a range.
    pub axiom_probability: f64,
    pub seed: u64,
}

impl Default for RandomKbSpec {
    fn default() -> Self {
        RandomKbSpec {
            concepts: 40,
            properties: 15,
            individuals: 300,
            triples: 2000,
            type_fraction: 0.3,
            literal_fraction: 0.1,
            dag_probability: 0.1,
            axiom_probability: 0.3,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RandomKb {
    pub axioms: Vec<SchemaAxiom>,
    pub abox: Vec<Triple>,
}

/// A random knowledge base. Axioms never mention the hierarchy roots, and
/// roughly one individual in ten is a blank node.
pub fn gen_random_kb(spec: RandomKbSpec) -> RandomKb {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let concepts = gen_random_hierarchy(spec.concepts + 1, HierarchyKind::Concept, Branching::new(1, 4), spec.dag_probability, rng.gen());
    let properties = gen_random_hierarchy(
        spec.properties + 1,
        HierarchyKind::Property,
        Branching::new(1, 3),
        spec.dag_probability,
        rng.gen(),
    );
    let concept = |i: usize| concepts.nodes[i].replace("/h/N", "/c/C");
    let property = |i: usize| properties.nodes[i].replace("/h/N", "/p/P");

    let mut axioms = Vec::new();
    axioms.extend(
        concepts
            .edges
            .iter()
            .filter(|e| e.1 != 0)
            .map(|&(a, b)| SchemaAxiom::sub_class(&concept(a), &concept(b))),
    );
    axioms.extend(
        properties
            .edges
            .iter()
            .filter(|e| e.1 != 0)
            .map(|&(a, b)| SchemaAxiom::sub_property(&property(a), &property(b))),
    );
    for p in 1..properties.len() {
        if rng.gen_bool(spec.axiom_probability) {
            axioms.push(SchemaAxiom::domain(&property(p), &concept(rng.gen_range(1..concepts.len()))));
        }
        if rng.gen_bool(spec.axiom_probability) {
            axioms.push(SchemaAxiom::range(&property(p), &concept(rng.gen_range(1..concepts.len()))));
        }
    }

    let individual = |i: usize| {
        if i % 10 == 9 {
            Term::blank(&format!("b{i}"))
        } else {
            Term::iri(format!("http://example.org/i/I{i}"))
        }
    };
    let mut abox = Vec::with_capacity(spec.triples);
    for _ in 0..spec.triples {
        let s = individual(rng.gen_range(0..spec.individuals));
        let t = if rng.gen_bool(spec.type_fraction) || spec.properties == 0 {
            Triple::new(s, Term::iri(RDF_TYPE), Term::iri(concept(rng.gen_range(1..concepts.len()))))
        } else {
            let p = Term::iri(property(rng.gen_range(1..properties.len())));
            let o = if rng.gen_bool(spec.literal_fraction) {
                Term::string_literal(&format!("v{}", rng.gen_range(0..50)))
            } else {
                individual(rng.gen_range(0..spec.individuals))
            };
            Triple::new(s, p, o)
        };
        abox.push(t.expect("subjects are never literals"));
    }
    RandomKb { axioms, abox }
}
