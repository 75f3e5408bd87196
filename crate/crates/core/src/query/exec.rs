use std::collections::{BTreeSet, HashMap};
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::plan::{Constraint, PhysicalPlan, PlanNode, Position, ScanNode};
use super::QueryError;
use crate::dataset::{EncodedDataset, EncodedTriple, Namespace};
use crate::hierarchy::{CodeTable, Id};
use crate::rdf::Term;

/// A bound value: the id and the table it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub id: Id,
    pub ns: Namespace,
}

pub type Row = Vec<Cell>;

/// Bag of rows over named columns.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResultSet {
    pub vars: Vec<String>,
    pub rows: Vec<Row>,
}

impl ResultSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct rows, sorted.
    pub fn distinct(&self) -> BTreeSet<Row> {
        self.rows.iter().cloned().collect()
    }
}

/// Counters collected during one execution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExecStats {
    pub scans: u64,
    pub triples_scanned: u64,
    /// Interval membership tests, each at most two comparisons plus a
    /// residual lookup.
    pub interval_tests: u64,
    pub equality_tests: u64,
    pub join_probes: u64,
    pub rows_out: u64,
}

#[derive(Default)]
struct Counters {
    scans: AtomicU64,
    triples_scanned: AtomicU64,
    interval_tests: AtomicU64,
    equality_tests: AtomicU64,
    join_probes: AtomicU64,
}

impl Counters {
    fn add(c: &AtomicU64, n: u64) {
        c.fetch_add(n, Ordering::Relaxed);
    }
}

struct Ctx<'a> {
    ds: &'a EncodedDataset,
    type_id: Id,
    counters: Counters,
    partitions: usize,
}

fn bucket(key: &[Cell], p: usize) -> usize {
    let mut h = DefaultHasher::new();
    key.hash(&mut h);
    (h.finish() % p as u64) as usize
}

#[derive(Default)]
struct Local {
    interval: u64,
    equality: u64,
}

impl Local {
    fn test(&mut self, c: &Constraint, x: Id, table: &CodeTable, is_type: bool) -> bool {
        match c {
            Constraint::Any => true,
            Constraint::Eq(v) => {
                self.equality += 1;
                x == *v
            }
            Constraint::Within(code) => {
                self.interval += 1;
                table.is_descendant_or_self(x, code)
            }
            Constraint::ByPredicate { concept, individual } => {
                self.equality += 1;
                let want = if is_type { concept } else { individual };
                *want == Some(x)
            }
        }
    }
}

impl Ctx<'_> {
    fn cell(&self, t: &EncodedTriple, pos: Position) -> Cell {
        match pos {
            Position::S => Cell {
                id: t.s,
                ns: Namespace::Individual,
            },
            Position::P => Cell {
                id: t.p,
                ns: Namespace::Property,
            },
            Position::O => Cell {
                id: t.o,
                ns: if t.p == self.type_id {
                    Namespace::Concept
                } else {
                    Namespace::Individual
                },
            },
        }
    }

    fn scan(&self, scan: &ScanNode) -> Vec<Row> {
        let tbox = self.ds.tbox();
        Counters::add(&self.counters.scans, 1);
        let parts: Vec<(Vec<Row>, u64, Local)> = self
            .ds
            .partitions()
            .par_iter()
            .map(|part| {
                let mut local = Local::default();
                let mut rows = Vec::new();
                for t in part {
                    let is_type = t.p == self.type_id;
                    if !local.test(&scan.p, t.p, tbox.properties(), false)
                        || !local.test(&scan.s, t.s, tbox.concepts(), false)
                        || !local.test(&scan.o, t.o, tbox.concepts(), is_type)
                    {
                        continue;
                    }
                    if scan.same.iter().any(|&(a, b)| self.cell(t, a) != self.cell(t, b)) {
                        continue;
                    }
                    rows.push(scan.outputs.iter().map(|(_, pos)| self.cell(t, *pos)).collect());
                }
                (rows, part.len() as u64, local)
            })
            .collect();
        let mut out = Vec::new();
        for (rows, n, local) in parts {
            Counters::add(&self.counters.triples_scanned, n);
            Counters::add(&self.counters.interval_tests, local.interval);
            Counters::add(&self.counters.equality_tests, local.equality);
            out.extend(rows);
        }
        out
    }

    /// Hash-partitions both inputs on the key, then joins each partition
    /// pair independently.
    fn hash_join(&self, left: Vec<Row>, lvars: &[String], right: Vec<Row>, rvars: &[String], keys: &[String]) -> Vec<Row> {
        let p = self.partitions;
        let lk: Vec<usize> = keys.iter().map(|k| lvars.iter().position(|v| v == k).expect("left key")).collect();
        let rk: Vec<usize> = keys.iter().map(|k| rvars.iter().position(|v| v == k).expect("right key")).collect();
        let rest: Vec<usize> = (0..rvars.len()).filter(|i| !rk.contains(i)).collect();
        let split = |rows: Vec<Row>, idx: &[usize]| -> Vec<Vec<(Row, Row)>> {
            let mut out: Vec<Vec<(Row, Row)>> = (0..p).map(|_| Vec::new()).collect();
            for r in rows {
                let key: Row = idx.iter().map(|&i| r[i]).collect();
                out[bucket(&key, p)].push((key, r));
            }
            out
        };
        let lparts = split(left, &lk);
        let rparts = split(right, &rk);
        let joined: Vec<(Vec<Row>, u64)> = lparts
            .into_par_iter()
            .zip(rparts.into_par_iter())
            .map(|(l, r)| {
                let mut table: HashMap<Row, Vec<Row>> = HashMap::with_capacity(l.len());
                for (k, row) in l {
                    table.entry(k).or_default().push(row);
                }
                let mut out = Vec::new();
                let probes = r.len() as u64;
                for (k, row) in r {
                    if let Some(matches) = table.get(&k) {
                        for m in matches {
                            let mut joined = m.clone();
                            joined.extend(rest.iter().map(|&i| row[i]));
                            out.push(joined);
                        }
                    }
                }
                (out, probes)
            })
            .collect();
        let mut out = Vec::new();
        for (rows, probes) in joined {
            Counters::add(&self.counters.join_probes, probes);
            out.extend(rows);
        }
        out
    }

    fn eval(&self, node: &PlanNode) -> Vec<Row> {
        match node {
            PlanNode::Scan(s) => self.scan(s),
            PlanNode::HashJoin { left, right, keys } => {
                let (l, r) = rayon::join(|| self.eval(left), || self.eval(right));
                self.hash_join(l, &left.vars(), r, &right.vars(), keys)
            }
            PlanNode::CrossProduct { left, right } => {
                let (l, r) = rayon::join(|| self.eval(left), || self.eval(right));
                l.par_iter()
                    .flat_map_iter(|a| {
                        r.iter().map(move |b| {
                            let mut row = a.clone();
                            row.extend_from_slice(b);
                            row
                        })
                    })
                    .collect()
            }
            PlanNode::Union { branches, .. } => branches.par_iter().flat_map_iter(|b| self.eval(b)).collect(),
            PlanNode::Project { input, vars } => {
                let ivars = input.vars();
                let idx: Vec<usize> = vars
                    .iter()
                    .map(|v| ivars.iter().position(|w| w == v).expect("projected variable is bound"))
                    .collect();
                self.eval(input)
                    .into_iter()
                    .map(|r| idx.iter().map(|&i| r[i]).collect())
                    .collect()
            }
            PlanNode::NonLiteral { input, vars } => {
                let ivars = input.vars();
                let idx: Vec<usize> = vars.iter().filter_map(|v| ivars.iter().position(|w| w == v)).collect();
                let dict = self.ds.individuals();
                self.eval(input)
                    .into_iter()
                    .filter(|r| {
                        idx.iter().all(|&i| {
                            r[i].ns != Namespace::Individual || !dict.term_of(r[i].id).is_some_and(Term::is_literal)
                        })
                    })
                    .collect()
            }
            PlanNode::Empty { .. } => Vec::new(),
        }
    }
}

/// Runs a plan with bag semantics. Row order is unspecified.
pub fn execute(plan: &PhysicalPlan, ds: &EncodedDataset) -> Result<(ResultSet, ExecStats), QueryError> {
    ds.require_obe()?;
    let ctx = Ctx {
        ds,
        type_id: ds.tbox().type_id(),
        counters: Counters::default(),
        partitions: ds.partitions().len().max(1),
    };
    let rows = ctx.eval(&plan.root);
    let vars = plan.root.vars();
    debug_assert_eq!(vars, plan.projection);
    let c = &ctx.counters;
    let stats = ExecStats {
        scans: c.scans.load(Ordering::Relaxed),
        triples_scanned: c.triples_scanned.load(Ordering::Relaxed),
        interval_tests: c.interval_tests.load(Ordering::Relaxed),
        equality_tests: c.equality_tests.load(Ordering::Relaxed),
        join_probes: c.join_probes.load(Ordering::Relaxed),
        rows_out: rows.len() as u64,
    };
    Ok((ResultSet { vars, rows }, stats))
}

/// Decodes every cell through the table its namespace names.
pub fn extract_results(rs: &ResultSet, ds: &EncodedDataset) -> Result<Vec<Vec<Term>>, QueryError> {
    rs.rows
        .iter()
        .map(|r| r.iter().map(|c| ds.extract(c.id, c.ns).map_err(QueryError::from)).collect())
        .collect()
}
