use std::borrow::Borrow;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{build_a2a, build_e2e, build_e2o, A2AMultigraph, E2EMultigraph, E2OGraph};
use crate::ingest::write_jsonl;
use crate::model::DbEventLog;

/// Content address of a snapshot: a digest of the canonical JSONL form of
/// its log. Equal logs always produce equal ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SnapshotId(String);

impl SnapshotId {
    pub fn of_log(log: &DbEventLog) -> Self {
        let digest = Sha256::digest(write_jsonl(log).as_bytes());
        Self(format!("s{}", &hex::encode(digest)[..20]))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for SnapshotId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SnapshotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A log together with the three graphs derived from it. Immutable; filters
/// produce new snapshots.
#[derive(Debug, Clone)]
pub struct ModelSnapshot {
    id: SnapshotId,
    log: Arc<DbEventLog>,
    e2o: E2OGraph,
    e2e: E2EMultigraph,
    a2a: A2AMultigraph,
}

impl PartialEq for ModelSnapshot {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.log == other.log
    }
}

impl ModelSnapshot {
    pub fn build(log: DbEventLog) -> Self {
        Self::from_shared(Arc::new(log))
    }

    pub fn from_shared(log: Arc<DbEventLog>) -> Self {
        let e2o = build_e2o(&log);
        let e2e = build_e2e(&log);
        let a2a = build_a2a(&log, &e2e);
        Self {
            id: SnapshotId::of_log(&log),
            log,
            e2o,
            e2e,
            a2a,
        }
    }

    pub fn id(&self) -> &SnapshotId {
        &self.id
    }

    pub fn log(&self) -> &DbEventLog {
        &self.log
    }

    pub fn shared_log(&self) -> Arc<DbEventLog> {
        Arc::clone(&self.log)
    }

    pub fn e2o(&self) -> &E2OGraph {
        &self.e2o
    }

    pub fn e2e(&self) -> &E2EMultigraph {
        &self.e2e
    }

    pub fn a2a(&self) -> &A2AMultigraph {
        &self.a2a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures;

    #[test]
    fn ids_are_content_addressed() {
        let a = ModelSnapshot::build(fixtures::l1());
        let b = ModelSnapshot::build(fixtures::l1());
        assert_eq!(a.id(), b.id());
        assert_ne!(a.id(), ModelSnapshot::build(DbEventLog::default()).id());
        assert_eq!(a.id().as_str().len(), 21);
    }

    #[test]
    fn graphs_are_consistent() {
        let s = ModelSnapshot::build(fixtures::l1());
        assert_eq!(s.e2o().edge_count(), 5);
        assert_eq!(s.e2e().len(), 3);
        assert_eq!(s.a2a().edges().len(), 3);
    }
}
