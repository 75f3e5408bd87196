//! Lite materialization (type reduction to the most specific concepts) and
//! the full RDFS closure baseline.

mod full;
mod lite;
mod msc;

use std::fmt;
use std::time::Duration;

pub use full::full_materialize;
pub use lite::{lite_materialize, type_profiles, TypeProfile};
pub use msc::msc;

use crate::dataset::DatasetError;
use crate::hierarchy::Id;

#[derive(Debug, thiserror::Error)]
pub enum MaterializeError {
    #[error("concept id {0} is not encoded")]
    UnknownConcept(Id),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaterializationMode {
    Lite,
    Full,
}

impl MaterializationMode {
    pub fn name(self) -> &'static str {
        match self {
            MaterializationMode::Lite => "lite",
            MaterializationMode::Full => "full",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lite" => Some(MaterializationMode::Lite),
            "full" => Some(MaterializationMode::Full),
            _ => None,
        }
    }
}

/// Counts are absolute; `net` is `added - deleted`. Lite counts only ever
/// concern type triples.
#[derive(Clone, Debug)]
pub struct MaterializationReport {
    pub mode: MaterializationMode,
    pub input_triples: usize,
    pub output_triples: usize,
    pub added: usize,
    pub deleted: usize,
    pub duration: Duration,
}

impl MaterializationReport {
    pub fn net(&self) -> i64 {
        self.added as i64 - self.deleted as i64
    }

    fn percent(&self, n: usize) -> f64 {
        if self.input_triples == 0 {
            0.0
        } else {
            100.0 * n as f64 / self.input_triples as f64
        }
    }

    pub fn added_percent(&self) -> f64 {
        self.percent(self.added)
    }

    pub fn deleted_percent(&self) -> f64 {
        self.percent(self.deleted)
    }
}

/// `mode added deleted duration_seconds added% deleted% net`
impl fmt::Display for MaterializationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {:.6} {:.2}% {:.2}% {}",
            self.mode.name(),
            self.added,
            self.deleted,
            self.duration.as_secs_f64(),
            self.added_percent(),
            self.deleted_percent(),
            self.net()
        )
    }
}
