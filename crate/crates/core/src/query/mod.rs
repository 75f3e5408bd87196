//! SPARQL subset: parsing, the locate step, interval-aware plans, execution
//! and the rewriting baseline.

mod ast;
mod exec;
mod parser;
mod plan;
mod rewrite;

pub use ast::{Alternative, Bgp, DisjunctiveGroup, DisjunctiveQuery, PatternTerm, Query, TriplePattern};
pub use exec::{execute, extract_results, Cell, ExecStats, ResultSet, Row};
pub use parser::{parse_query, parse_query_with_prefixes, validate};
pub use plan::{
    build_disjunctive_plan, build_plan, check_variable_namespaces, join_in_order, locate_query, scan_node, Constraint,
    DatasetSummary, Located, LocatedPattern, LocatedQuery, MatchMode, PhysicalPlan, PlanNode, PlanOptions, Position,
    ScanNode,
};
pub use rewrite::{pattern_alternatives, rewrite_query, Rewriting};

use crate::dataset::{DatasetError, EncodedDataset};

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error("syntax error at byte {position}: {reason}")]
    Syntax { position: usize, reason: String },
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("invalid query: {0}")]
    Invalid(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// How a query is answered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryMode {
    /// Interval plans, for lite-materialized data.
    LiteMat,
    /// Rewritten query with exact matching, for unmaterialized data.
    Rewrite,
    /// The query as written with exact matching, for fully closed data.
    Direct,
}

impl QueryMode {
    pub fn name(self) -> &'static str {
        match self {
            QueryMode::LiteMat => "litemat",
            QueryMode::Rewrite => "rewrite",
            QueryMode::Direct => "direct",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "litemat" => Some(QueryMode::LiteMat),
            "rewrite" => Some(QueryMode::Rewrite),
            "direct" => Some(QueryMode::Direct),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RewriteForm {
    /// One OR group per pattern, joined.
    #[default]
    Disjunctive,
    /// A union of conjunctive branches.
    Union,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AnswerOptions {
    pub simplify_empty: bool,
    pub rewrite_form: RewriteForm,
}

#[derive(Clone, Debug)]
pub struct Answer {
    pub results: ResultSet,
    pub plan: PhysicalPlan,
    pub stats: ExecStats,
    /// Conjunctive branches the evaluated query stands for.
    pub branches: usize,
}

/// Plans and runs `q` over `ds` in the given mode.
pub fn answer(q: &Query, ds: &EncodedDataset, mode: QueryMode, opts: &AnswerOptions) -> Result<Answer, QueryError> {
    ds.require_obe()?;
    validate(q)?;
    check_variable_namespaces(q)?;
    let summary = opts.simplify_empty.then(|| DatasetSummary::of(ds));
    let plan_opts = |mode| PlanOptions {
        mode,
        simplify_empty: opts.simplify_empty,
    };
    let (plan, branches) = match mode {
        QueryMode::LiteMat | QueryMode::Direct => {
            let m = if mode == QueryMode::LiteMat {
                MatchMode::Interval
            } else {
                MatchMode::Exact
            };
            let plan = build_plan(&locate_query(q, ds), ds.tbox(), plan_opts(m), summary.as_ref());
            (plan, q.body.len())
        }
        QueryMode::Rewrite => {
            let r = rewrite_query(q, ds.tbox());
            let plan = match opts.rewrite_form {
                RewriteForm::Union => build_plan(&locate_query(&r.union, ds), ds.tbox(), plan_opts(MatchMode::Exact), summary.as_ref()),
                RewriteForm::Disjunctive => {
                    build_disjunctive_plan(&r.disjunctive, ds, plan_opts(MatchMode::Exact), summary.as_ref())
                }
            };
            (plan, r.branch_count())
        }
    };
    let (results, stats) = execute(&plan, ds)?;
    Ok(Answer {
        results,
        plan,
        stats,
        branches,
    })
}

#[cfg(test)]
mod tests;
