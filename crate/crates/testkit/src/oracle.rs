use std::collections::{BTreeSet, HashMap, HashSet};

use intervalrdf_core::query::{Bgp, PatternTerm, Query};
use intervalrdf_core::rdf::vocab::{RDFS_DOMAIN, RDFS_RANGE, RDFS_SUBCLASS_OF, RDFS_SUBPROPERTY_OF, RDF_TYPE};
use intervalrdf_core::rdf::{SchemaAxiom, Term, Triple};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SCHEMA_PREDICATES: [&str; 4] = [RDFS_SUBCLASS_OF, RDFS_SUBPROPERTY_OF, RDFS_DOMAIN, RDFS_RANGE];

#[derive(Clone, Copy, Debug)]
enum Rule {
    SubClassTransitive,
    SubPropertyTransitive,
    SubProperty,
    SubClass,
    Domain,
    Range,
}

const RULES: [Rule; 6] = [
    Rule::SubClassTransitive,
    Rule::SubPropertyTransitive,
    Rule::SubProperty,
    Rule::SubClass,
    Rule::Domain,
    Rule::Range,
];

fn by_subject<'a>(graph: &'a HashSet<Triple>, predicate: &str) -> HashMap<&'a Term, Vec<&'a Term>> {
    let mut out: HashMap<&Term, Vec<&Term>> = HashMap::new();
    for t in graph.iter().filter(|t| t.p.lexical() == predicate) {
        out.entry(&t.s).or_default().push(&t.o);
    }
    out
}

fn fire(rule: Rule, graph: &HashSet<Triple>) -> Vec<Triple> {
    let mut out = Vec::new();
    let triple = |s: &Term, p: &Term, o: &Term| Triple {
        s: s.clone(),
        p: p.clone(),
        o: o.clone(),
    };
    match rule {
        Rule::SubClassTransitive | Rule::SubPropertyTransitive => {
            let pred = if matches!(rule, Rule::SubClassTransitive) {
                RDFS_SUBCLASS_OF
            } else {
                RDFS_SUBPROPERTY_OF
            };
            let up = by_subject(graph, pred);
            for (a, bs) in &up {
                for b in bs {
                    for c in up.get(b).into_iter().flatten() {
                        out.push(triple(a, &Term::iri(pred), c));
                    }
                }
            }
        }
        Rule::SubProperty => {
            let up = by_subject(graph, RDFS_SUBPROPERTY_OF);
            for t in graph {
                for q in up.get(&t.p).into_iter().flatten() {
                    out.push(triple(&t.s, q, &t.o));
                }
            }
        }
        Rule::SubClass => {
            let up = by_subject(graph, RDFS_SUBCLASS_OF);
            let ty = Term::iri(RDF_TYPE);
            for t in graph.iter().filter(|t| t.p == ty) {
                for c in up.get(&t.o).into_iter().flatten() {
                    out.push(triple(&t.s, &ty, c));
                }
            }
        }
        Rule::Domain | Rule::Range => {
            let pred = if matches!(rule, Rule::Domain) { RDFS_DOMAIN } else { RDFS_RANGE };
            let axioms = by_subject(graph, pred);
            let ty = Term::iri(RDF_TYPE);
            for t in graph {
                let Some(cs) = axioms.get(&t.p) else { continue };
                let node = if matches!(rule, Rule::Domain) { &t.s } else { &t.o };
                if node.is_literal() {
                    continue;
                }
                for c in cs {
                    out.push(triple(node, &ty, c));
                }
            }
        }
    }
    out
}

/// RDFS closure of `triples` under `axioms`: the fixpoint of the subclass,
/// subproperty, domain and range rules plus the two transitivity rules,
/// reached by applying the rules in a fresh random order on every round.
/// Literals are never typed. Schema triples are left out of the result.
pub fn oracle_entails(triples: &[Triple], axioms: &[SchemaAxiom], seed: u64) -> BTreeSet<Triple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graph: HashSet<Triple> = triples.iter().cloned().collect();
    graph.extend(axioms.iter().map(SchemaAxiom::to_triple));
    let mut order = RULES;
    loop {
        order.shuffle(&mut rng);
        let before = graph.len();
        for rule in order {
            let fresh = fire(rule, &graph);
            graph.extend(fresh);
        }
        if graph.len() == before {
            break;
        }
    }
    graph
        .into_iter()
        .filter(|t| !SCHEMA_PREDICATES.contains(&t.p.lexical()))
        .collect()
}

type Binding = HashMap<String, Term>;

fn unify(pt: &PatternTerm, value: &Term, b: &mut Binding, added: &mut Vec<String>) -> bool {
    match pt {
        PatternTerm::Const(c) => c == value,
        PatternTerm::Var(v) => match b.get(v) {
            Some(bound) => bound == value,
            None => {
                b.insert(v.clone(), value.clone());
                added.push(v.clone());
                true
            }
        },
    }
}

fn solve(bgp: &Bgp, i: usize, graph: &[Triple], b: &mut Binding, out: &mut Vec<Binding>) {
    let Some(p) = bgp.patterns.get(i) else {
        if bgp.non_literal.iter().all(|v| !b.get(v).is_some_and(Term::is_literal)) {
            out.push(b.clone());
        }
        return;
    };
    for t in graph {
        let mut added = Vec::new();
        if unify(&p.s, &t.s, b, &mut added) && unify(&p.p, &t.p, b, &mut added) && unify(&p.o, &t.o, b, &mut added) {
            solve(bgp, i + 1, graph, b, out);
        }
        for v in added {
            b.remove(&v);
        }
    }
}

/// Answers `q` by nested-loop matching over the entailed closure. Rows are
/// distinct projections.
pub fn oracle_answer(q: &Query, triples: &[Triple], axioms: &[SchemaAxiom], seed: u64) -> BTreeSet<Vec<Term>> {
    let graph: Vec<Triple> = oracle_entails(triples, axioms, seed).into_iter().collect();
    let mut rows = BTreeSet::new();
    for bgp in &q.body {
        let mut found = Vec::new();
        solve(bgp, 0, &graph, &mut Binding::new(), &mut found);
        for b in found {
            rows.insert(
                q.projection
                    .iter()
                    .map(|v| b.get(v).cloned().unwrap_or_else(|| panic!("?{v} is not bound by every branch")))
                    .collect(),
            );
        }
    }
    rows
}
