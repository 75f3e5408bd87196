use std::collections::BTreeSet;
use std::sync::Arc;

use super::*;
use crate::dataset::{encode_dataset, EncodeOptions, EncodedDataset, EncodingScheme, Namespace};
use crate::hierarchy::TBoxBuilder;
use crate::materialize::{full_materialize, lite_materialize};
use crate::rdf::vocab::RDF_TYPE;
use crate::rdf::{SchemaAxiom, Term, Triple};

const EX: &str = "http://example.org/";

fn ex(s: &str) -> String {
    format!("{EX}{s}")
}

fn parse(text: &str) -> Query {
    parse_query_with_prefixes(text, &[("", EX)]).unwrap()
}

fn schema() -> Vec<SchemaAxiom> {
    vec![
        SchemaAxiom::sub_class(&ex("Professor"), &ex("FacultyMember")),
        SchemaAxiom::sub_class(&ex("FullProfessor"), &ex("Professor")),
        SchemaAxiom::sub_class(&ex("Chair"), &ex("Professor")),
        SchemaAxiom::sub_class(&ex("Department"), &ex("Organization")),
        SchemaAxiom::sub_property(&ex("worksFor"), &ex("memberOf")),
        SchemaAxiom::sub_property(&ex("headOf"), &ex("worksFor")),
        SchemaAxiom::domain(&ex("teaches"), &ex("FacultyMember")),
        SchemaAxiom::range(&ex("advisor"), &ex("Professor")),
        SchemaAxiom::range(&ex("memberOf"), &ex("Organization")),
    ]
}

fn data() -> Vec<Triple> {
    let t = |s: &str, p: &str, o: &str| Triple::iris(&ex(s), p, &ex(o));
    let ty = RDF_TYPE;
    vec![
        t("bernd", ty, "Professor"),
        t("hubert", &ex("teaches"), "course1"),
        t("fp", ty, "FullProfessor"),
        t("chair", ty, "Chair"),
        t("chair", &ex("headOf"), "d1"),
        t("d1", ty, "Department"),
        t("fp", &ex("worksFor"), "d1"),
        t("bernd", &ex("memberOf"), "d2"),
        t("student", &ex("advisor"), "adv"),
        Triple::new(Term::iri(ex("student")), Term::iri(ex("advisor")), Term::string_literal("lit")).unwrap(),
    ]
}

fn encode(triples: &[Triple], axioms: Vec<SchemaAxiom>) -> EncodedDataset {
    let mut b = TBoxBuilder::new(axioms);
    b.discover(triples);
    encode_dataset(triples, Arc::new(b.build().unwrap()), &EncodeOptions::with_partitions(3)).unwrap()
}

fn run(q: &Query, ds: &EncodedDataset, mode: QueryMode, opts: &AnswerOptions) -> BTreeSet<Vec<Term>> {
    let a = answer(q, ds, mode, opts).unwrap();
    extract_results(&a.results, ds).unwrap().into_iter().collect()
}

fn names(rows: &BTreeSet<Vec<Term>>) -> BTreeSet<Vec<String>> {
    rows.iter()
        .map(|r| r.iter().map(|t| t.lexical().trim_start_matches(EX).to_string()).collect())
        .collect()
}

fn set(rows: &[&[&str]]) -> BTreeSet<Vec<String>> {
    rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect()
}

#[test]
fn example1_faculty_members() {
    let ds = encode(
        &[
            Triple::iris(&ex("bernd"), RDF_TYPE, &ex("Professor")),
            Triple::iris(&ex("hubert"), &ex("teaches"), &ex("course1")),
        ],
        vec![
            SchemaAxiom::sub_class(&ex("Professor"), &ex("FacultyMember")),
            SchemaAxiom::domain(&ex("teaches"), &ex("FacultyMember")),
        ],
    );
    let (lite, _) = lite_materialize(&ds).unwrap();
    let q = parse("SELECT ?x WHERE { ?x rdf:type FacultyMember }");
    let got = run(&q, &lite, QueryMode::LiteMat, &AnswerOptions::default());
    assert_eq!(names(&got), set(&[&["bernd"], &["hubert"]]));
}

#[test]
fn q1_is_one_interval_scan() {
    let ds = encode(&data(), schema());
    let (lite, _) = lite_materialize(&ds).unwrap();
    let q = parse("SELECT ?x WHERE { ?x rdf:type Professor . }");
    let a = answer(&q, &lite, QueryMode::LiteMat, &AnswerOptions::default()).unwrap();
    assert_eq!(a.plan.root.scan_count(), 1);
    assert_eq!(a.plan.root.interval_predicate_count(), 1);
    let PlanNode::Scan(scan) = &a.plan.root else {
        panic!("expected a bare scan, got {}", a.plan.root)
    };
    let prof = lite.tbox().concepts().code_of(&ex("Professor")).unwrap();
    assert_eq!(scan.p, Constraint::Eq(lite.tbox().type_id()));
    assert_eq!(scan.o, Constraint::Within(*prof));
    assert!(a.stats.interval_tests <= lite.len() as u64);
    assert_eq!(
        names(&extract_results(&a.results, &lite).unwrap().into_iter().collect()),
        set(&[&["bernd"], &["fp"], &["chair"], &["adv"]])
    );

    let r = answer(&q, &ds, QueryMode::Rewrite, &AnswerOptions::default()).unwrap();
    assert_eq!(r.branches, 4);
    assert_eq!(r.plan.root.scan_count(), 4);
    assert_eq!(r.plan.root.interval_predicate_count(), 0);
}

#[test]
fn q3_joins_on_shared_variable() {
    let ds = encode(&data(), schema());
    let q = parse("SELECT ?x ?y WHERE { ?x rdf:type Professor . ?x memberOf ?y . }");
    let (lite, _) = lite_materialize(&ds).unwrap();
    let a = answer(&q, &lite, QueryMode::LiteMat, &AnswerOptions::default()).unwrap();
    match &a.plan.root {
        PlanNode::HashJoin { keys, left, right } => {
            assert_eq!(keys, &["x"]);
            assert!(matches!(**left, PlanNode::Scan(_)) && matches!(**right, PlanNode::Scan(_)));
        }
        other => panic!("unexpected plan {other}"),
    }
    assert_eq!(
        names(&extract_results(&a.results, &lite).unwrap().into_iter().collect()),
        set(&[&["bernd", "d2"], &["fp", "d1"], &["chair", "d1"]])
    );
}

#[test]
fn three_modes_agree() {
    let ds = encode(&data(), schema());
    let (lite, _) = lite_materialize(&ds).unwrap();
    let (full, _) = full_materialize(&ds).unwrap();
    let queries = [
        "SELECT ?x WHERE { ?x a Professor }",
        "SELECT ?x ?y WHERE { ?x memberOf ?y }",
        "SELECT ?x ?y WHERE { ?x a Professor . ?x memberOf ?y }",
        "SELECT ?x WHERE { ?x a Chair . ?y a Department . ?x worksFor ?y }",
        "SELECT ?x WHERE { ?x a FacultyMember }",
        "SELECT ?y WHERE { ?y a Organization }",
        "SELECT ?x ?y WHERE { ?x memberOf ?y . ?y a Organization }",
        "SELECT ?x WHERE {{ ?x a Chair } UNION { ?x teaches ?c }}",
    ];
    for text in queries {
        let q = parse(text);
        for opts in [
            AnswerOptions::default(),
            AnswerOptions {
                simplify_empty: true,
                rewrite_form: RewriteForm::Union,
            },
        ] {
            let a = run(&q, &lite, QueryMode::LiteMat, &opts);
            let b = run(&q, &full, QueryMode::Direct, &opts);
            let c = run(&q, &ds, QueryMode::Rewrite, &opts);
            assert_eq!(a, b, "{text}");
            assert_eq!(a, c, "{text}");
            assert!(!a.is_empty(), "{text}");
        }
    }
}

#[test]
fn literal_objects_are_not_typed() {
    let ds = encode(&data(), schema());
    let q = parse("SELECT ?x WHERE { ?x a Professor }");
    let got = run(&q, &ds, QueryMode::Rewrite, &AnswerOptions::default());
    assert!(got.iter().all(|r| !r[0].is_literal()));
}

#[test]
fn join_order_does_not_change_results() {
    let ds = encode(&data(), schema());
    let (lite, _) = lite_materialize(&ds).unwrap();
    let a = parse("SELECT ?x ?y WHERE { ?x a Chair . ?y a Department . ?x worksFor ?y }");
    let b = parse("SELECT ?x ?y WHERE { ?y a Department . ?x worksFor ?y . ?x a Chair }");
    let c = parse("SELECT ?x ?y WHERE { ?x a Chair . ?x worksFor ?y . ?y a Department }");
    let opts = AnswerOptions::default();
    let ra = run(&a, &lite, QueryMode::LiteMat, &opts);
    assert_eq!(ra, run(&b, &lite, QueryMode::LiteMat, &opts));
    assert_eq!(ra, run(&c, &lite, QueryMode::LiteMat, &opts));
    // The disconnected second pattern waits until ?y is bound.
    let plan = answer(&a, &lite, QueryMode::LiteMat, &opts).unwrap().plan;
    assert_eq!(plan.root.count_nodes(|n| matches!(n, PlanNode::CrossProduct { .. })), 0);
}

#[test]
fn cross_product_when_nothing_connects() {
    let ds = encode(&data(), schema());
    let q = parse("SELECT ?x ?y WHERE { ?x a Chair . ?y a Department }");
    let a = answer(&q, &ds, QueryMode::Direct, &AnswerOptions::default()).unwrap();
    assert_eq!(a.plan.root.count_nodes(|n| matches!(n, PlanNode::CrossProduct { .. })), 1);
    assert_eq!(a.results.len(), 1);
}

#[test]
fn unknown_constant_gives_empty_branch() {
    let ds = encode(&data(), schema());
    let q = parse("SELECT ?x WHERE {{ ?x a Nonexistent } UNION { ?x a Chair }}");
    let a = answer(&q, &ds, QueryMode::Direct, &AnswerOptions::default()).unwrap();
    assert_eq!(a.results.len(), 1);
    let q = parse("SELECT ?x WHERE { ?x nope ?y }");
    let a = answer(&q, &ds, QueryMode::LiteMat, &AnswerOptions::default()).unwrap();
    assert!(matches!(a.plan.root, PlanNode::Empty { .. }));
    assert!(a.results.is_empty());
}

#[test]
fn simplification_prunes_unmatched_branches() {
    let ds = encode(&data(), schema());
    let q = parse("SELECT ?x WHERE { ?x a FacultyMember }");
    let with = AnswerOptions {
        simplify_empty: true,
        rewrite_form: RewriteForm::Union,
    };
    let without = AnswerOptions {
        rewrite_form: RewriteForm::Union,
        ..AnswerOptions::default()
    };
    let a = answer(&q, &ds, QueryMode::Rewrite, &with).unwrap();
    let b = answer(&q, &ds, QueryMode::Rewrite, &without).unwrap();
    assert!(a.plan.root.scan_count() < b.plan.root.scan_count());
    assert_eq!(a.branches, b.branches);
    assert_eq!(a.results.distinct(), b.results.distinct());
}

#[test]
fn variable_predicate_and_full_scan() {
    let ds = encode(&data(), schema());
    let q = parse("SELECT ?s ?p ?o WHERE { ?s ?p ?o }");
    let a = answer(&q, &ds, QueryMode::LiteMat, &AnswerOptions::default()).unwrap();
    let PlanNode::Scan(scan) = &a.plan.root else { panic!() };
    assert_eq!((&scan.s, &scan.p, &scan.o), (&Constraint::Any, &Constraint::Any, &Constraint::Any));
    let rows: BTreeSet<Triple> = extract_results(&a.results, &ds)
        .unwrap()
        .into_iter()
        .map(|r| Triple::new(r[0].clone(), r[1].clone(), r[2].clone()).unwrap())
        .collect();
    assert_eq!(rows, data().into_iter().collect());
    assert_eq!(a.plan.column_namespaces(), vec![Some(Namespace::Individual), Some(Namespace::Property), None]);

    let q = parse("SELECT ?p WHERE { <http://example.org/chair> ?p Chair }");
    let got = run(&q, &ds, QueryMode::LiteMat, &AnswerOptions::default());
    assert_eq!(got, [vec![Term::iri(RDF_TYPE)]].into());
}

#[test]
fn column_namespaces() {
    let ds = encode(&data(), schema());
    let q = parse("SELECT ?x ?y WHERE { ?x memberOf ?y }");
    let a = answer(&q, &ds, QueryMode::LiteMat, &AnswerOptions::default()).unwrap();
    assert_eq!(a.plan.column_namespaces(), vec![Some(Namespace::Individual); 2]);
    let q = parse("SELECT ?c WHERE { ?x a ?c }");
    let a = answer(&q, &ds, QueryMode::LiteMat, &AnswerOptions::default()).unwrap();
    assert_eq!(a.plan.column_namespaces(), vec![Some(Namespace::Concept)]);
    assert!(a.results.rows.iter().all(|r| r[0].ns == Namespace::Concept));
}

#[test]
fn namespace_conflicts_rejected() {
    let ds = encode(&data(), schema());
    for text in [
        "SELECT ?p WHERE { ?x ?p ?y . ?p a Chair }",
        "SELECT ?c WHERE { ?x a ?c . ?c memberOf ?y }",
    ] {
        let q = parse(text);
        assert!(matches!(answer(&q, &ds, QueryMode::LiteMat, &AnswerOptions::default()), Err(QueryError::Invalid(_))), "{text}");
    }
}

#[test]
fn empty_dataset() {
    let ds = encode(&[], schema());
    let q = parse("SELECT ?x WHERE { ?x a Professor }");
    for mode in [QueryMode::LiteMat, QueryMode::Direct, QueryMode::Rewrite] {
        assert!(answer(&q, &ds, mode, &AnswerOptions::default()).unwrap().results.is_empty());
    }
}

#[test]
fn sae_dataset_rejected() {
    let tbox = Arc::new(TBoxBuilder::new(schema()).build().unwrap());
    let opts = EncodeOptions {
        scheme: EncodingScheme::Sae,
        ..EncodeOptions::with_partitions(1)
    };
    let ds = encode_dataset(&[], tbox, &opts).unwrap();
    let q = parse("SELECT ?x WHERE { ?x a Professor }");
    assert!(matches!(
        answer(&q, &ds, QueryMode::LiteMat, &AnswerOptions::default()),
        Err(QueryError::Dataset(crate::dataset::DatasetError::RequiresOntologyEncoding))
    ));
}

#[test]
fn bag_semantics_internally() {
    let ds = encode(&data(), schema());
    let q = parse("SELECT ?x WHERE { ?x memberOf ?y }");
    let (full, _) = full_materialize(&ds).unwrap();
    let a = answer(&q, &full, QueryMode::Direct, &AnswerOptions::default()).unwrap();
    // fp and chair both reach d1 (chair through headOf and worksFor).
    assert!(a.results.len() >= a.results.distinct().len());
    assert_eq!(a.results.len(), 3);
}
