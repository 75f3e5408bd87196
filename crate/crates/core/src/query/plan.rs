use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ast::{Bgp, DisjunctiveQuery, PatternTerm, Query, TriplePattern};
use super::QueryError;
use crate::dataset::{EncodedDataset, Namespace};
use crate::hierarchy::{CodeTable, EntityCode, Id, TBoxEncoding};

/// How constant predicates and type objects are matched.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchMode {
    /// Interval membership, so one comparison covers every subentity.
    Interval,
    /// Plain equality, for data that is already closed or for rewritten
    /// queries.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanOptions {
    pub mode: MatchMode,
    /// Replace branches that contain a pattern no stored triple can match
    /// by an empty relation before execution.
    pub simplify_empty: bool,
}

impl PlanOptions {
    pub fn new(mode: MatchMode) -> Self {
        Self {
            mode,
            simplify_empty: false,
        }
    }
}

/// A pattern position after the locate step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Located {
    Var(String),
    Const { id: Id, ns: Namespace },
    /// Constant object under a variable predicate: which id applies depends
    /// on whether the matched triple is a type triple.
    Either { concept: Option<Id>, individual: Option<Id> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocatedPattern {
    pub pattern: TriplePattern,
    pub s: Located,
    pub p: Located,
    pub o: Located,
}

/// A branch of a located query, or the constant that made it empty.
pub type LocatedBranch = Result<Vec<LocatedPattern>, String>;

#[derive(Clone, Debug)]
pub struct LocatedQuery {
    pub projection: Vec<String>,
    pub branches: Vec<(LocatedBranch, BTreeSet<String>)>,
}

fn locate_pattern(p: &TriplePattern, ds: &EncodedDataset) -> Result<LocatedPattern, String> {
    let locate = |t: &PatternTerm, ns: Namespace| -> Result<Located, String> {
        match t {
            PatternTerm::Var(v) => Ok(Located::Var(v.clone())),
            PatternTerm::Const(term) => ds
                .locate(term, ns)
                .map(|id| Located::Const { id, ns })
                .map_err(|_| term.to_string()),
        }
    };
    let s = locate(&p.s, Namespace::Individual)?;
    let pl = locate(&p.p, Namespace::Property)?;
    let o = match (&pl, &p.o) {
        (Located::Var(_), PatternTerm::Const(term)) => {
            let concept = ds.locate(term, Namespace::Concept).ok();
            let individual = ds.locate(term, Namespace::Individual).ok();
            if concept.is_none() && individual.is_none() {
                return Err(term.to_string());
            }
            Located::Either { concept, individual }
        }
        _ if p.is_type() => locate(&p.o, Namespace::Concept)?,
        _ => locate(&p.o, Namespace::Individual)?,
    };
    Ok(LocatedPattern {
        pattern: p.clone(),
        s,
        p: pl,
        o,
    })
}

/// Replaces every constant by its id. A constant missing from its table
/// makes its branch empty rather than failing the query.
pub fn locate_query(q: &Query, ds: &EncodedDataset) -> LocatedQuery {
    LocatedQuery {
        projection: q.projection.clone(),
        branches: q
            .body
            .iter()
            .map(|b| (locate_bgp(b, ds), b.non_literal.clone()))
            .collect(),
    }
}

fn locate_bgp(b: &Bgp, ds: &EncodedDataset) -> LocatedBranch {
    b.patterns.iter().map(|p| locate_pattern(p, ds)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    S,
    P,
    O,
}

/// Test applied to one position of a candidate triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    Any,
    Eq(Id),
    /// `code.value <= x < bound(code)`, or `(x, code.value)` is a residual
    /// pair.
    Within(EntityCode),
    /// Concept id for type triples, individual id for all others.
    ByPredicate { concept: Option<Id>, individual: Option<Id> },
}

impl Constraint {
    pub fn is_interval(&self) -> bool {
        matches!(self, Constraint::Within(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanNode {
    pub pattern: TriplePattern,
    pub s: Constraint,
    pub p: Constraint,
    pub o: Constraint,
    /// Output columns: each distinct variable and where it is read from.
    pub outputs: Vec<(String, Position)>,
    /// Positions that must hold the same term because they share a
    /// variable.
    pub same: Vec<(Position, Position)>,
}

impl ScanNode {
    pub fn interval_predicates(&self) -> usize {
        [&self.s, &self.p, &self.o].iter().filter(|c| c.is_interval()).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanNode {
    Scan(ScanNode),
    HashJoin {
        left: Box<PlanNode>,
        right: Box<PlanNode>,
        keys: Vec<String>,
    },
    /// Only produced when a pattern shares no variable with the rest of its
    /// conjunction.
    CrossProduct { left: Box<PlanNode>, right: Box<PlanNode> },
    /// Branches all produce `vars`, in that column order.
    Union { vars: Vec<String>, branches: Vec<PlanNode> },
    Project { input: Box<PlanNode>, vars: Vec<String> },
    /// Drops rows where any of `vars` is bound to a literal.
    NonLiteral { input: Box<PlanNode>, vars: Vec<String> },
    Empty { vars: Vec<String>, reason: String },
}

impl PlanNode {
    pub fn vars(&self) -> Vec<String> {
        match self {
            PlanNode::Scan(s) => s.outputs.iter().map(|(v, _)| v.clone()).collect(),
            PlanNode::HashJoin { left, right, .. } | PlanNode::CrossProduct { left, right } => {
                let mut v = left.vars();
                for r in right.vars() {
                    if !v.contains(&r) {
                        v.push(r);
                    }
                }
                v
            }
            PlanNode::Union { vars, .. } | PlanNode::Project { vars, .. } | PlanNode::Empty { vars, .. } => vars.clone(),
            PlanNode::NonLiteral { input, .. } => input.vars(),
        }
    }

    fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a PlanNode)) {
        f(self);
        match self {
            PlanNode::HashJoin { left, right, .. } | PlanNode::CrossProduct { left, right } => {
                left.walk(f);
                right.walk(f);
            }
            PlanNode::Union { branches, .. } => branches.iter().for_each(|b| b.walk(f)),
            PlanNode::Project { input, .. } | PlanNode::NonLiteral { input, .. } => input.walk(f),
            PlanNode::Scan(_) | PlanNode::Empty { .. } => {}
        }
    }

    pub fn scans(&self) -> Vec<&ScanNode> {
        let mut out = Vec::new();
        self.walk(&mut |n| {
            if let PlanNode::Scan(s) = n {
                out.push(s);
            }
        });
        out
    }

    pub fn scan_count(&self) -> usize {
        self.scans().len()
    }

    pub fn interval_predicate_count(&self) -> usize {
        self.scans().iter().map(|s| s.interval_predicates()).sum()
    }

    pub fn count_nodes(&self, pred: fn(&PlanNode) -> bool) -> usize {
        let mut n = 0;
        self.walk(&mut |node| n += usize::from(pred(node)));
        n
    }

    fn explain(&self, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            PlanNode::Scan(s) => writeln!(f, "{pad}Scan {} [s={:?} p={:?} o={:?}]", s.pattern, s.s, s.p, s.o),
            PlanNode::HashJoin { left, right, keys } => {
                writeln!(f, "{pad}HashJoin on {keys:?}")?;
                left.explain(depth + 1, f)?;
                right.explain(depth + 1, f)
            }
            PlanNode::CrossProduct { left, right } => {
                writeln!(f, "{pad}CrossProduct")?;
                left.explain(depth + 1, f)?;
                right.explain(depth + 1, f)
            }
            PlanNode::Union { vars, branches } => {
                writeln!(f, "{pad}Union {vars:?} ({} branches)", branches.len())?;
                branches.iter().try_for_each(|b| b.explain(depth + 1, f))
            }
            PlanNode::Project { input, vars } => {
                writeln!(f, "{pad}Project {vars:?}")?;
                input.explain(depth + 1, f)
            }
            PlanNode::NonLiteral { input, vars } => {
                writeln!(f, "{pad}NonLiteral {vars:?}")?;
                input.explain(depth + 1, f)
            }
            PlanNode::Empty { vars, reason } => writeln!(f, "{pad}Empty {vars:?} ({reason})"),
        }
    }
}

impl fmt::Display for PlanNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.explain(0, f)
    }
}

/// Predicates and type objects present in a dataset, for the emptiness
/// simplification.
#[derive(Clone, Debug, Default)]
pub struct DatasetSummary {
    predicates: BTreeSet<Id>,
    type_objects: BTreeSet<Id>,
}

impl DatasetSummary {
    pub fn of(ds: &EncodedDataset) -> Self {
        let type_id = ds.tbox().type_id();
        let mut out = Self::default();
        for t in ds.triples() {
            out.predicates.insert(t.p);
            if t.p == type_id {
                out.type_objects.insert(t.o);
            }
        }
        out
    }

    fn may_match(set: &BTreeSet<Id>, c: &Constraint, table: &CodeTable) -> bool {
        match c {
            Constraint::Eq(v) => set.contains(v),
            Constraint::Within(code) => {
                set.range(code.value..code.bound()).next().is_some()
                    || table.residual_descendants(code.value).iter().any(|d| set.contains(d))
            }
            Constraint::Any | Constraint::ByPredicate { .. } => true,
        }
    }

    /// `false` only if no stored triple can satisfy the scan.
    pub fn may_match_scan(&self, scan: &ScanNode, tbox: &TBoxEncoding) -> bool {
        if !Self::may_match(&self.predicates, &scan.p, tbox.properties()) {
            return false;
        }
        if scan.p == Constraint::Eq(tbox.type_id()) {
            return Self::may_match(&self.type_objects, &scan.o, tbox.concepts());
        }
        true
    }
}

#[derive(Clone, Debug)]
pub struct PhysicalPlan {
    pub root: PlanNode,
    pub projection: Vec<String>,
    pub options: PlanOptions,
}

impl PhysicalPlan {
    /// Static namespace of each output column; `None` when it depends on
    /// the row (the object of a variable predicate).
    pub fn column_namespaces(&self) -> Vec<Option<Namespace>> {
        let mut seen: BTreeMap<&str, BTreeSet<Option<Namespace>>> = BTreeMap::new();
        let type_eq = |c: &Constraint| matches!(c, Constraint::Eq(_));
        let scans = self.root.scans();
        for s in &scans {
            for (v, pos) in &s.outputs {
                let ns = match pos {
                    Position::S => Some(Namespace::Individual),
                    Position::P => Some(Namespace::Property),
                    Position::O if s.pattern.is_type() => Some(Namespace::Concept),
                    Position::O if type_eq(&s.p) || s.p.is_interval() => Some(Namespace::Individual),
                    Position::O => None,
                };
                seen.entry(v.as_str()).or_default().insert(ns);
            }
        }
        self.projection
            .iter()
            .map(|v| match seen.get(v.as_str()) {
                Some(set) if set.len() == 1 => *set.iter().next().expect("non-empty"),
                _ => None,
            })
            .collect()
    }
}

fn constraint(l: &Located, table: &CodeTable, interval: bool) -> Constraint {
    match l {
        Located::Var(_) => Constraint::Any,
        Located::Const { id, .. } if interval => match table.code_by_value(*id) {
            Some(code) => Constraint::Within(*code),
            None => Constraint::Eq(*id),
        },
        Located::Const { id, .. } => Constraint::Eq(*id),
        Located::Either { concept, individual } => Constraint::ByPredicate {
            concept: *concept,
            individual: *individual,
        },
    }
}

/// Builds the scan for one located pattern.
pub fn scan_node(lp: &LocatedPattern, tbox: &TBoxEncoding, mode: MatchMode) -> ScanNode {
    let interval = mode == MatchMode::Interval;
    let is_type = matches!(lp.p, Located::Const { id, .. } if id == tbox.type_id());
    let s = match &lp.s {
        Located::Const { id, .. } => Constraint::Eq(*id),
        _ => Constraint::Any,
    };
    let p = if is_type {
        Constraint::Eq(tbox.type_id())
    } else {
        constraint(&lp.p, tbox.properties(), interval)
    };
    let o = if is_type {
        constraint(&lp.o, tbox.concepts(), interval)
    } else {
        match &lp.o {
            Located::Const { id, .. } => Constraint::Eq(*id),
            other => constraint(other, tbox.concepts(), false),
        }
    };
    let mut outputs: Vec<(String, Position)> = Vec::new();
    let mut same = Vec::new();
    for (l, pos) in [(&lp.s, Position::S), (&lp.p, Position::P), (&lp.o, Position::O)] {
        if let Located::Var(v) = l {
            match outputs.iter().find(|(w, _)| w == v) {
                Some((_, first)) => same.push((*first, pos)),
                None => outputs.push((v.clone(), pos)),
            }
        }
    }
    ScanNode {
        pattern: lp.pattern.clone(),
        s,
        p,
        o,
        outputs,
        same,
    }
}

/// Left-deep join of `inputs` in the given order, except that an input
/// sharing no variable with what has been joined so far waits for the first
/// later input that connects.
pub fn join_in_order(inputs: Vec<PlanNode>) -> PlanNode {
    let mut pending = inputs;
    let mut acc = pending.remove(0);
    while !pending.is_empty() {
        let vars = acc.vars();
        let next = pending
            .iter()
            .position(|n| n.vars().iter().any(|v| vars.contains(v)))
            .unwrap_or(0);
        let right = pending.remove(next);
        let keys: Vec<String> = right.vars().into_iter().filter(|v| vars.contains(v)).collect();
        acc = if keys.is_empty() {
            PlanNode::CrossProduct {
                left: Box::new(acc),
                right: Box::new(right),
            }
        } else {
            PlanNode::HashJoin {
                left: Box::new(acc),
                right: Box::new(right),
                keys,
            }
        };
    }
    acc
}

fn project(node: PlanNode, vars: &[String]) -> PlanNode {
    if node.vars() == vars {
        node
    } else {
        PlanNode::Project {
            input: Box::new(node),
            vars: vars.to_vec(),
        }
    }
}

fn guard(node: PlanNode, non_literal: &BTreeSet<String>) -> PlanNode {
    if non_literal.is_empty() {
        node
    } else {
        PlanNode::NonLiteral {
            input: Box::new(node),
            vars: non_literal.iter().cloned().collect(),
        }
    }
}

/// Rejects variables used both as predicates and as subjects/objects, and
/// variables used both as type objects and as individuals.
pub fn check_variable_namespaces(q: &Query) -> Result<(), QueryError> {
    check_patterns(q.body.iter().flat_map(|b| b.patterns.iter()))
}

fn check_patterns<'a>(patterns: impl Iterator<Item = &'a TriplePattern>) -> Result<(), QueryError> {
    #[derive(Default)]
    struct Uses {
        property: bool,
        concept: bool,
        individual: bool,
    }
    let mut uses: BTreeMap<&str, Uses> = BTreeMap::new();
    for p in patterns {
        if let Some(v) = p.s.as_var() {
            uses.entry(v).or_default().individual = true;
        }
        if let Some(v) = p.p.as_var() {
            uses.entry(v).or_default().property = true;
        }
        if let Some(v) = p.o.as_var() {
            let u = uses.entry(v).or_default();
            if p.is_type() {
                u.concept = true;
            } else if p.p.as_const().is_some() {
                u.individual = true;
            }
        }
    }
    for (v, u) in uses {
        let subject_or_object = u.concept || u.individual;
        if u.property && subject_or_object {
            return Err(QueryError::Invalid(format!("?{v} is used both as a predicate and as a subject or object")));
        }
        if u.concept && u.individual {
            return Err(QueryError::Invalid(format!("?{v} is used both as a type and as an individual")));
        }
    }
    Ok(())
}

fn conjunction(
    patterns: &[LocatedPattern],
    tbox: &TBoxEncoding,
    opts: PlanOptions,
    summary: Option<&DatasetSummary>,
) -> Result<PlanNode, String> {
    let scans: Vec<ScanNode> = patterns.iter().map(|lp| scan_node(lp, tbox, opts.mode)).collect();
    if let Some(summary) = summary {
        if let Some(s) = scans.iter().find(|s| !summary.may_match_scan(s, tbox)) {
            return Err(format!("no stored triple matches {}", s.pattern));
        }
    }
    Ok(join_in_order(scans.into_iter().map(PlanNode::Scan).collect()))
}

fn union(projection: &[String], mut branches: Vec<PlanNode>) -> PlanNode {
    let non_empty: Vec<PlanNode> = branches
        .drain(..)
        .filter(|b| !matches!(b, PlanNode::Empty { .. }))
        .collect();
    match non_empty.len() {
        0 => PlanNode::Empty {
            vars: projection.to_vec(),
            reason: "every branch is empty".into(),
        },
        1 => non_empty.into_iter().next().expect("one branch"),
        _ => PlanNode::Union {
            vars: projection.to_vec(),
            branches: non_empty,
        },
    }
}

/// Plans a located query: one conjunction per UNION branch, joined in
/// written order, aligned to the projection and unioned.
pub fn build_plan(q: &LocatedQuery, tbox: &TBoxEncoding, opts: PlanOptions, summary: Option<&DatasetSummary>) -> PhysicalPlan {
    let summary = summary.filter(|_| opts.simplify_empty);
    let branches = q
        .branches
        .iter()
        .map(|(branch, non_literal)| {
            let node = branch
                .as_ref()
                .map_err(|missing| format!("{missing} is not in the dataset"))
                .and_then(|pats| conjunction(pats, tbox, opts, summary));
            match node {
                Ok(node) => project(guard(node, non_literal), &q.projection),
                Err(reason) => PlanNode::Empty {
                    vars: q.projection.clone(),
                    reason,
                },
            }
        })
        .collect();
    PhysicalPlan {
        root: union(&q.projection, branches),
        projection: q.projection.clone(),
        options: opts,
    }
}

/// Plans the per-pattern OR form: each group becomes a union of its
/// alternatives, and the groups are joined in order.
pub fn build_disjunctive_plan(
    q: &DisjunctiveQuery,
    ds: &EncodedDataset,
    opts: PlanOptions,
    summary: Option<&DatasetSummary>,
) -> PhysicalPlan {
    let tbox = ds.tbox();
    let summary = summary.filter(|_| opts.simplify_empty);
    let branches = q
        .body
        .iter()
        .map(|groups| {
            let mut inputs = Vec::with_capacity(groups.len());
            for g in groups {
                let alts: Vec<PlanNode> = g
                    .alternatives
                    .iter()
                    .filter_map(|alt| {
                        let lp = locate_pattern(&alt.pattern, ds).ok()?;
                        let scan = scan_node(&lp, tbox, opts.mode);
                        if summary.is_some_and(|s| !s.may_match_scan(&scan, tbox)) {
                            return None;
                        }
                        let guarded = guard(PlanNode::Scan(scan), &alt.non_literal.iter().cloned().collect());
                        Some(project(guarded, &g.vars))
                    })
                    .collect();
                let node = union(&g.vars, alts);
                if matches!(node, PlanNode::Empty { .. }) {
                    return PlanNode::Empty {
                        vars: q.projection.clone(),
                        reason: "an OR group has no matching alternative".into(),
                    };
                }
                inputs.push(node);
            }
            project(join_in_order(inputs), &q.projection)
        })
        .collect();
    PhysicalPlan {
        root: union(&q.projection, branches),
        projection: q.projection.clone(),
        options: opts,
    }
}
