use std::collections::{BTreeSet, VecDeque};

use intervalrdf_core::rdf::{AxiomKind, SchemaAxiom};

type Pairs = BTreeSet<(String, String)>;

/// Reflexive-transitive closures of the two subsumption hierarchies,
/// computed by repeated pair composition until nothing new appears.
#[derive(Clone, Debug, Default)]
pub struct ClosureOracle {
    /// `(sub, sup)` pairs over concepts.
    pub subclass: Pairs,
    /// `(sub, sup)` pairs over properties.
    pub subproperty: Pairs,
}

fn naive_closure(edges: impl Iterator<Item = (String, String)>) -> Pairs {
    let mut pairs = Pairs::new();
    for (a, b) in edges {
        pairs.insert((a.clone(), a.clone()));
        pairs.insert((b.clone(), b.clone()));
        pairs.insert((a, b));
    }
    loop {
        let mut fresh = Vec::new();
        for (a, b) in &pairs {
            for (_, c) in pairs.range((b.clone(), String::new())..).take_while(|(x, _)| x == b) {
                if !pairs.contains(&(a.clone(), c.clone())) {
                    fresh.push((a.clone(), c.clone()));
                }
            }
        }
        if fresh.is_empty() {
            return pairs;
        }
        pairs.extend(fresh);
    }
}

impl ClosureOracle {
    pub fn new(axioms: &[SchemaAxiom]) -> Self {
        let edges = |kind: AxiomKind| {
            axioms
                .iter()
                .filter(move |a| a.kind == kind)
                .map(|a| (a.subject.clone(), a.object.clone()))
        };
        ClosureOracle {
            subclass: naive_closure(edges(AxiomKind::SubClassOf)),
            subproperty: naive_closure(edges(AxiomKind::SubPropertyOf)),
        }
    }

    pub fn is_subclass(&self, sub: &str, sup: &str) -> bool {
        sub == sup || self.subclass.contains(&(sub.to_string(), sup.to_string()))
    }

    pub fn is_subproperty(&self, sub: &str, sup: &str) -> bool {
        sub == sup || self.subproperty.contains(&(sub.to_string(), sup.to_string()))
    }

    pub fn superclasses<'a>(&'a self, c: &'a str) -> BTreeSet<&'a str> {
        let mut out: BTreeSet<&str> = self
            .subclass
            .range((c.to_string(), String::new())..)
            .take_while(|(a, _)| a == c)
            .map(|(_, b)| b.as_str())
            .collect();
        out.insert(c);
        out
    }
}

/// Plain breadth-first reachability over `(sub, sup)` index edges.
#[derive(Clone, Debug)]
pub struct Reachability {
    up: Vec<Vec<usize>>,
}

impl Reachability {
    pub fn new(edges: &[(usize, usize)], n: usize) -> Self {
        let mut up = vec![Vec::new(); n];
        for &(a, b) in edges {
            up[a].push(b);
        }
        Reachability { up }
    }

    /// Everything reachable from `from`, itself included.
    pub fn ancestors(&self, from: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.up[x] {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }
}
