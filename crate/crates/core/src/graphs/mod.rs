//! The three graphs of a StarStar model and the snapshot that bundles them.

mod a2a;
mod e2e;
mod e2o;
mod export;
mod snapshot;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use a2a::{build_a2a, A2AEdge, A2AMultigraph};
pub use e2e::{build_e2e, e2e_neighborhood, E2EEdge, E2EMultigraph};
pub use e2o::{build_e2o, E2OGraph};
pub use export::{a2a_json, to_dot, ActivityNode};
pub use snapshot::{ModelSnapshot, SnapshotId};

use crate::model::{Activity, ObjectClass};

/// Identifies one A2A edge: an object class and an ordered activity pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    pub class: ObjectClass,
    pub source: Activity,
    pub target: Activity,
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {} -> {})", self.class, self.source, self.target)
    }
}

/// Edge decoration selectable in views and exports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Count,
    Weight,
    Perf,
}

impl Metric {
    pub fn value(self, edge: &A2AEdge) -> f64 {
        match self {
            Metric::Count => edge.count as f64,
            Metric::Weight => edge.weight,
            Metric::Perf => edge.perf,
        }
    }

    pub fn format(self, value: f64) -> String {
        match self {
            Metric::Count => format!("{}", value as u64),
            Metric::Weight | Metric::Perf => format!("{value:.2}"),
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "count" | "frequency" => Ok(Metric::Count),
            "weight" => Ok(Metric::Weight),
            "perf" | "performance" => Ok(Metric::Perf),
            other => Err(format!("unknown metric {other:?} (expected count, weight or perf)")),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Count => "count",
            Metric::Weight => "weight",
            Metric::Perf => "perf",
        })
    }
}
