use std::collections::BTreeSet;

use super::ast::{Alternative, Bgp, DisjunctiveGroup, DisjunctiveQuery, PatternTerm, Query, TriplePattern};
use crate::hierarchy::{HierarchyKind, Id, TBoxEncoding};
use crate::rdf::vocab::RDF_TYPE;
use crate::rdf::Term;

/// The two equivalent shapes of a rewritten query.
#[derive(Clone, Debug)]
pub struct Rewriting {
    /// Union of conjunctions: one branch per combination of alternatives.
    pub union: Query,
    /// One OR group per original pattern.
    pub disjunctive: DisjunctiveQuery,
    /// Alternative count of every pattern, per original branch.
    pub alternatives: Vec<Vec<usize>>,
}

impl Rewriting {
    pub fn branch_count(&self) -> usize {
        self.union.body.len()
    }
}

struct Fresh {
    taken: BTreeSet<String>,
    next: usize,
}

impl Fresh {
    fn var(&mut self) -> String {
        loop {
            let name = format!("_rw{}", self.next);
            self.next += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn labels(tbox: &TBoxEncoding, kind: HierarchyKind, values: impl IntoIterator<Item = Id>) -> Vec<String> {
    let table = tbox.table(kind);
    values
        .into_iter()
        .filter_map(|v| table.label_of(v).map(str::to_string))
        .collect()
}

/// Alternatives of one pattern for evaluation over unmaterialized data.
///
/// A constant predicate expands to its subproperties. A type pattern with a
/// constant concept expands to its subconcepts and to every property whose
/// own or inherited domain (range) is one of them, since a triple with such
/// a property entails the type for its subject (non-literal object).
pub fn pattern_alternatives(p: &TriplePattern, tbox: &TBoxEncoding, fresh: &mut impl FnMut() -> String) -> Vec<Alternative> {
    let plain = |pattern: TriplePattern| Alternative {
        pattern,
        non_literal: None,
    };
    let Some(pred) = p.p.as_const() else {
        return vec![plain(p.clone())];
    };
    if !p.is_type() {
        let Some(code) = tbox.properties().code_of(pred.lexical()) else {
            return vec![plain(p.clone())];
        };
        return labels(tbox, HierarchyKind::Property, tbox.properties().descendants_or_self(code.value))
            .into_iter()
            .map(|q| plain(TriplePattern::new(p.s.clone(), PatternTerm::Const(Term::iri(q)), p.o.clone())))
            .collect();
    }
    let Some(code) = p.o.as_const().filter(|c| c.is_iri()).and_then(|c| tbox.concepts().code_of(c.lexical())) else {
        return vec![plain(p.clone())];
    };
    let subs: BTreeSet<Id> = tbox.concepts().descendants_or_self(code.value).into_iter().collect();
    let mut out: Vec<Alternative> = labels(tbox, HierarchyKind::Concept, subs.iter().copied())
        .into_iter()
        .map(|c| plain(TriplePattern::new(p.s.clone(), PatternTerm::iri(RDF_TYPE), PatternTerm::Const(Term::iri(c)))))
        .collect();
    let properties = tbox.properties();
    let root = properties.root().code.value;
    let candidates: Vec<(Id, String)> = properties
        .entries()
        .iter()
        .filter(|e| e.code.value != root && e.code.value != tbox.type_id())
        .map(|e| (e.code.value, e.label().to_string()))
        .collect();
    for (q, label) in &candidates {
        if tbox.inherited_domain(*q).iter().any(|c| subs.contains(c)) {
            out.push(plain(TriplePattern::new(p.s.clone(), PatternTerm::iri(label), PatternTerm::var(&fresh()))));
        }
    }
    for (q, label) in &candidates {
        if tbox.inherited_range(*q).iter().any(|c| subs.contains(c)) {
            out.push(Alternative {
                pattern: TriplePattern::new(PatternTerm::var(&fresh()), PatternTerm::iri(label), p.s.clone()),
                non_literal: p.s.as_var().map(str::to_string),
            });
        }
    }
    out
}

/// Rewrites `q` so that plain matching over the unmaterialized data returns
/// the entailed answers. Variable predicates and variable type objects are
/// left as they are.
pub fn rewrite_query(q: &Query, tbox: &TBoxEncoding) -> Rewriting {
    let mut fresh = Fresh {
        taken: q.body.iter().flat_map(|b| b.vars()).map(str::to_string).collect(),
        next: 0,
    };
    let mut next_var = || fresh.var();
    let mut union_body = Vec::new();
    let mut disjunctive_body = Vec::new();
    let mut alternatives = Vec::new();
    for bgp in &q.body {
        let groups: Vec<DisjunctiveGroup> = bgp
            .patterns
            .iter()
            .map(|p| DisjunctiveGroup {
                vars: p.vars().into_iter().map(str::to_string).collect(),
                alternatives: pattern_alternatives(p, tbox, &mut next_var),
            })
            .collect();
        alternatives.push(groups.iter().map(|g| g.alternatives.len()).collect());

        let mut combos: Vec<Bgp> = vec![Bgp {
            patterns: Vec::new(),
            non_literal: bgp.non_literal.clone(),
        }];
        for g in &groups {
            combos = combos
                .iter()
                .flat_map(|partial| {
                    g.alternatives.iter().map(move |alt| {
                        let mut b = partial.clone();
                        b.patterns.push(alt.pattern.clone());
                        b.non_literal.extend(alt.non_literal.iter().cloned());
                        b
                    })
                })
                .collect();
        }
        union_body.extend(combos);
        disjunctive_body.push(groups);
    }
    Rewriting {
        union: Query {
            projection: q.projection.clone(),
            distinct: q.distinct,
            body: union_body,
        },
        disjunctive: DisjunctiveQuery {
            projection: q.projection.clone(),
            body: disjunctive_body,
        },
        alternatives,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::TBoxBuilder;
    use crate::rdf::SchemaAxiom;

    fn tbox() -> TBoxEncoding {
        TBoxBuilder::new(vec![
            SchemaAxiom::sub_class("Professor", "FacultyMember"),
            SchemaAxiom::sub_class("FullProfessor", "Professor"),
            SchemaAxiom::sub_class("Chair", "Professor"),
            SchemaAxiom::sub_property("worksFor", "memberOf"),
            SchemaAxiom::sub_property("headOf", "worksFor"),
            SchemaAxiom::domain("teaches", "FacultyMember"),
            SchemaAxiom::range("advisor", "Professor"),
        ])
        .build()
        .unwrap()
    }

    fn tp(s: &str, p: &str, o: &str) -> TriplePattern {
        let term = |x: &str| match x.strip_prefix('?') {
            Some(v) => PatternTerm::var(v),
            None => PatternTerm::iri(x),
        };
        TriplePattern::new(term(s), term(p), term(o))
    }

    #[test]
    fn property_expansion() {
        let q = Query::single(&["x", "y"], vec![tp("?x", "memberOf", "?y")]);
        let r = rewrite_query(&q, &tbox());
        assert_eq!(r.branch_count(), 3);
        let preds: BTreeSet<String> = r.union.body.iter().map(|b| b.patterns[0].p.as_const().unwrap().lexical().to_string()).collect();
        assert_eq!(preds, ["headOf", "memberOf", "worksFor"].map(String::from).into());
    }

    #[test]
    fn concept_expansion_with_range_alternative() {
        let q = Query::single(&["x"], vec![tp("?x", RDF_TYPE, "Professor")]);
        let r = rewrite_query(&q, &tbox());
        // Professor, FullProfessor, Chair, and the range of advisor.
        assert_eq!(r.branch_count(), 4);
        let guarded: Vec<&Bgp> = r.union.body.iter().filter(|b| !b.non_literal.is_empty()).collect();
        assert_eq!(guarded.len(), 1);
        assert_eq!(guarded[0].patterns[0].o, PatternTerm::var("x"));
        assert!(guarded[0].non_literal.contains("x"));
    }

    #[test]
    fn domain_alternative_for_superconcept() {
        let q = Query::single(&["x"], vec![tp("?x", RDF_TYPE, "FacultyMember")]);
        let r = rewrite_query(&q, &tbox());
        assert_eq!(r.alternatives, vec![vec![6]]);
        assert!(r
            .union
            .body
            .iter()
            .any(|b| b.patterns[0].p == PatternTerm::iri("teaches") && b.patterns[0].s == PatternTerm::var("x")));
    }

    #[test]
    fn product_of_alternatives() {
        let q = Query::single(&["x", "y"], vec![tp("?x", RDF_TYPE, "Professor"), tp("?x", "memberOf", "?y")]);
        let r = rewrite_query(&q, &tbox());
        assert_eq!(r.alternatives, vec![vec![4, 3]]);
        assert_eq!(r.branch_count(), 12);
        assert_eq!(r.disjunctive.expanded_branch_count(), 12);
        assert!(r.union.body.iter().all(|b| b.patterns.len() == 2));
    }

    #[test]
    fn leaves_without_subentities_unchanged() {
        let q = Query::single(&["x"], vec![tp("?x", RDF_TYPE, "FullProfessor"), tp("?x", "headOf", "?y")]);
        let r = rewrite_query(&q, &tbox());
        assert_eq!(r.union.body, q.body);
        let v = Query::single(&["x"], vec![tp("?x", "?p", "?y")]);
        assert_eq!(rewrite_query(&v, &tbox()).union.body, v.body);
    }

    #[test]
    fn fresh_variables_avoid_user_names() {
        let q = Query::single(&["_rw0"], vec![tp("?_rw0", RDF_TYPE, "FacultyMember")]);
        let r = rewrite_query(&q, &tbox());
        assert_eq!(r.branch_count(), 6);
        for b in &r.union.body {
            let vars = b.patterns[0].vars();
            assert_eq!(vars.iter().filter(|v| **v == "_rw0").count(), 1, "{}", b.patterns[0]);
        }
    }
}
