use intervalrdf_core::rdf::ntriples::to_ntriples_string;
use intervalrdf_core::rdf::vocab::{RDF_TYPE, XSD};
use intervalrdf_core::rdf::{extract_schema, parse_ntriples_str, SchemaAxiom, Term, Triple};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const UB: &str = "http://swat.cse.lehigh.edu/onto/univ-bench.owl#";

pub fn ub(local: &str) -> String {
    format!("{UB}{local}")
}

/// The university ontology with 43 concepts and 32 properties.
pub const UNIV_BENCH_NT: &str = include_str!("../data/univ-bench.nt");

pub fn univ_bench_axioms() -> Vec<SchemaAxiom> {
    let triples = parse_ntriples_str(UNIV_BENCH_NT).expect("bundled schema parses");
    extract_schema(&triples).expect("bundled schema is valid")
}

/// The four benchmark queries, with `ub:` predeclared.
pub const Q1: &str = "PREFIX ub: <http://swat.cse.lehigh.edu/onto/univ-bench.owl#>
SELECT ?x WHERE { ?x rdf:type ub:Professor . }";
pub const Q2: &str = "PREFIX ub: <http://swat.cse.lehigh.edu/onto/univ-bench.owl#>
SELECT ?x ?y WHERE { ?x ub:memberOf ?y . }";
pub const Q3: &str = "PREFIX ub: <http://swat.cse.lehigh.edu/onto/univ-bench.owl#>
SELECT ?x ?y WHERE { ?x rdf:type ub:Professor . ?x ub:memberOf ?y . }";
pub const Q4: &str = "PREFIX ub: <http://swat.cse.lehigh.edu/onto/univ-bench.owl#>
SELECT ?x WHERE { ?x rdf:type ub:Chair . ?y rdf:type ub:Department . ?x ub:worksFor ?y . }";

pub const QUERIES: [(&str, &str); 4] = [("Q1", Q1), ("Q2", Q2), ("Q3", Q3), ("Q4", Q4)];

const SUBCLASS: &[(&str, &str)] = &[
    ("University", "Organization"),
    ("Department", "Organization"),
    ("College", "Organization"),
    ("Institute", "Organization"),
    ("ResearchGroup", "Organization"),
    ("Program", "Organization"),
    ("Employee", "Person"),
    ("FacultyMember", "Employee"),
    ("Professor", "FacultyMember"),
    ("AssistantProfessor", "Professor"),
    ("AssociateProfessor", "Professor"),
    ("FullProfessor", "Professor"),
    ("VisitingProfessor", "Professor"),
    ("Chair", "Professor"),
    ("Dean", "Professor"),
    ("AdjunctProfessor", "Professor"),
    ("Lecturer", "FacultyMember"),
    ("PostDoc", "FacultyMember"),
    ("AdministrativeStaff", "Employee"),
    ("ClericalStaff", "AdministrativeStaff"),
    ("SystemsStaff", "AdministrativeStaff"),
    ("Student", "Person"),
    ("UndergraduateStudent", "Student"),
    ("GraduateStudent", "Student"),
    ("TeachingAssistant", "Person"),
    ("ResearchAssistant", "Person"),
    ("Director", "Person"),
    ("Course", "Work"),
    ("GraduateCourse", "Course"),
    ("Research", "Work"),
    ("Article", "Publication"),
    ("JournalArticle", "Article"),
    ("ConferencePaper", "Article"),
    ("TechnicalReport", "Article"),
    ("Book", "Publication"),
];

const SUBPROPERTY: &[(&str, &str)] = &[
    ("worksFor", "memberOf"),
    ("headOf", "worksFor"),
    ("undergraduateDegreeFrom", "degreeFrom"),
    ("mastersDegreeFrom", "degreeFrom"),
    ("doctoralDegreeFrom", "degreeFrom"),
];

const DOMAIN: &[(&str, &str)] = &[
    ("teaches", "FacultyMember"),
    ("takesCourse", "Student"),
    ("advisor", "Student"),
    ("degreeFrom", "Person"),
    ("subOrganizationOf", "Organization"),
    ("publicationAuthor", "Publication"),
    ("teachingAssistantOf", "TeachingAssistant"),
    ("researchInterest", "Person"),
    ("emailAddress", "Person"),
    ("telephone", "Person"),
    ("name", "Organization"),
    ("title", "Person"),
    ("hasAlumnus", "University"),
    ("affiliatedOrganizationOf", "Organization"),
    ("affiliateOf", "Organization"),
    ("orgPublication", "Organization"),
    ("listedCourse", "Schedule"),
    ("researchProject", "ResearchGroup"),
    ("publicationResearch", "Publication"),
    ("tenured", "FacultyMember"),
    ("age", "Person"),
    ("officeNumber", "Employee"),
    ("member", "Organization"),
    ("publicationDate", "Publication"),
];

const RANGE: &[(&str, &str)] = &[
    ("memberOf", "Organization"),
    ("teaches", "Course"),
    ("takesCourse", "Course"),
    ("advisor", "FacultyMember"),
    ("degreeFrom", "University"),
    ("subOrganizationOf", "Organization"),
    ("publicationAuthor", "Person"),
    ("teachingAssistantOf", "Course"),
    ("hasAlumnus", "Person"),
    ("affiliatedOrganizationOf", "Organization"),
    ("affiliateOf", "Person"),
    ("orgPublication", "Publication"),
    ("listedCourse", "Course"),
    ("researchProject", "Research"),
    ("publicationResearch", "Research"),
    ("member", "Person"),
];

/// Schema of the generated universities: 40 concepts, 30 properties.
///
/// Professor has seven direct subconcepts and memberOf is refined by
/// worksFor, itself refined by headOf. No domain or range points into the
/// Professor subtree or at Department, so the benchmark queries keep their
/// textbook rewritings.
pub fn mini_lubm_axioms() -> Vec<SchemaAxiom> {
    let mut out = Vec::new();
    out.extend(SUBCLASS.iter().map(|(a, b)| SchemaAxiom::sub_class(&ub(a), &ub(b))));
    out.extend(SUBPROPERTY.iter().map(|(a, b)| SchemaAxiom::sub_property(&ub(a), &ub(b))));
    out.extend(DOMAIN.iter().map(|(p, c)| SchemaAxiom::domain(&ub(p), &ub(c))));
    out.extend(RANGE.iter().map(|(p, c)| SchemaAxiom::range(&ub(p), &ub(c))));
    out
}

/// Concepts a generated professor is typed with.
pub const PROFESSOR_KINDS: [&str; 8] = [
    "Professor",
    "AssistantProfessor",
    "AssociateProfessor",
    "FullProfessor",
    "VisitingProfessor",
    "Chair",
    "Dean",
    "AdjunctProfessor",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MiniLubmSpec {
    pub universities: usize,
    pub departments: usize,
    pub professors: usize,
    pub students: usize,
    pub seed: u64,
}

impl MiniLubmSpec {
    pub fn new(universities: usize, departments: usize, professors: usize, students: usize, seed: u64) -> Self {
        MiniLubmSpec {
            universities,
            departments,
            professors,
            students,
            seed,
        }
    }

    /// Size of the generated ABox:
    ///
    /// `U * (2 + D * (3 + 8 P + S * (3 + 2 [P > 0])))`
    ///
    /// Each university has a type and a name. Each department has a type,
    /// its university and one research group. Each professor has a type, an
    /// employer, a course, a doctorate, an email, a research interest and a
    /// publication with its date. Each student has a type, a department and
    /// an email, plus a course and an advisor when the department has
    /// professors.
    pub fn expected_triples(&self) -> usize {
        let per_student = 3 + if self.professors > 0 { 2 } else { 0 };
        let per_department = 3 + 8 * self.professors + self.students * per_student;
        self.universities * (2 + self.departments * per_department)
    }
}

#[derive(Clone, Debug)]
pub struct MiniLubm {
    pub axioms: Vec<SchemaAxiom>,
    pub abox: Vec<Triple>,
}

impl MiniLubm {
    pub fn schema_triples(&self) -> Vec<Triple> {
        self.axioms.iter().map(SchemaAxiom::to_triple).collect()
    }

    pub fn schema_ntriples(&self) -> String {
        to_ntriples_string(&self.schema_triples())
    }

    pub fn abox_ntriples(&self) -> String {
        to_ntriples_string(&self.abox)
    }
}

/// Deterministic university data. Professor 0 of every department is a
/// Chair and its head; courses, publications and research groups are never
/// typed explicitly.
pub fn gen_mini_lubm(spec: MiniLubmSpec) -> MiniLubm {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let ty = |s: &str, c: &str| Triple::iris(s, RDF_TYPE, &ub(c));
    let rel = |s: &str, p: &str, o: &str| Triple::iris(s, &ub(p), o);
    let lit = |s: &str, p: &str, o: Term| Triple::new(Term::iri(s), Term::iri(ub(p)), o).expect("IRI subject");
    let univ = |u: usize| format!("http://www.University{u}.edu");
    let mut abox = Vec::with_capacity(spec.expected_triples());
    for u in 0..spec.universities {
        let un = univ(u);
        abox.push(ty(&un, "University"));
        abox.push(lit(&un, "name", Term::string_literal(&format!("University{u}"))));
        for d in 0..spec.departments {
            let dept = format!("http://www.Department{d}.University{u}.edu");
            abox.push(ty(&dept, "Department"));
            abox.push(rel(&dept, "subOrganizationOf", &un));
            abox.push(rel(&format!("{dept}/ResearchGroup0"), "subOrganizationOf", &dept));
            let mut courses = Vec::with_capacity(spec.professors);
            for i in 0..spec.professors {
                let prof = format!("{dept}/Professor{i}");
                let kind = if i == 0 {
                    "Chair"
                } else {
                    PROFESSOR_KINDS.choose(&mut rng).expect("non-empty")
                };
                let course = format!("{dept}/Course{i}");
                let publication = format!("{dept}/Professor{i}/Publication0");
                abox.push(ty(&prof, kind));
                abox.push(rel(&prof, if i == 0 { "headOf" } else { "worksFor" }, &dept));
                abox.push(rel(&prof, "teaches", &course));
                abox.push(rel(&prof, "doctoralDegreeFrom", &univ(rng.gen_range(0..spec.universities))));
                abox.push(lit(&prof, "emailAddress", Term::string_literal(&format!("Professor{i}@Department{d}.University{u}.edu"))));
                abox.push(lit(&prof, "researchInterest", Term::string_literal(&format!("Research{}", rng.gen_range(0..20)))));
                abox.push(rel(&publication, "publicationAuthor", &prof));
                abox.push(lit(
                    &publication,
                    "publicationDate",
                    Term::typed_literal(&rng.gen_range(1990..2016).to_string(), &format!("{XSD}gYear")),
                ));
                courses.push((prof, course));
            }
            for j in 0..spec.students {
                let student = format!("{dept}/Student{j}");
                let kind = if rng.gen_bool(0.7) {
                    "UndergraduateStudent"
                } else {
                    "GraduateStudent"
                };
                abox.push(ty(&student, kind));
                abox.push(rel(&student, "memberOf", &dept));
                abox.push(lit(&student, "emailAddress", Term::string_literal(&format!("Student{j}@Department{d}.University{u}.edu"))));
                if !courses.is_empty() {
                    let (_, course) = courses.choose(&mut rng).expect("non-empty");
                    abox.push(rel(&student, "takesCourse", course));
                    let (prof, _) = courses.choose(&mut rng).expect("non-empty");
                    abox.push(rel(&student, "advisor", prof));
                }
            }
        }
    }
    MiniLubm {
        axioms: mini_lubm_axioms(),
        abox,
    }
}
