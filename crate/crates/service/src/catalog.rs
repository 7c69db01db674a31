use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use starstar_core::filter::CheckpointStore;
use starstar_core::ingest::{parse_jsonl, write_jsonl};
use starstar_core::{DbEventLog, ModelSnapshot, SnapshotId};

use crate::error::ApiError;

struct LogEntry {
    initial: SnapshotId,
    /// Every snapshot derived from this log, the initial one included.
    lineage: BTreeSet<SnapshotId>,
    checkpoints: CheckpointStore,
}

/// Uploaded logs, the snapshots derived from them and their checkpoints.
/// Snapshots are shared between logs with identical content.
#[derive(Default)]
pub struct SessionCatalog {
    logs: HashMap<String, LogEntry>,
    snapshots: HashMap<SnapshotId, Arc<ModelSnapshot>>,
    next_log: u64,
    state_dir: Option<PathBuf>,
}

impl SessionCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// A catalog that writes every uploaded log to `dir` as `<logId>.jsonl`
    /// and starts with whatever logs it finds there.
    pub fn with_state_dir(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        let mut catalog = Self {
            state_dir: Some(dir.to_path_buf()),
            ..Self::default()
        };
        let mut found = Vec::new();
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            let Some(n) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_prefix("log-")?.strip_suffix(".jsonl")?.parse::<u64>().ok())
            else {
                continue;
            };
            found.push((n, path));
        }
        found.sort();
        for (n, path) in found {
            match parse_jsonl(&fs::read(&path)?) {
                Ok(log) => {
                    catalog.insert_log(format!("log-{n}"), ModelSnapshot::build(log));
                    catalog.next_log = catalog.next_log.max(n + 1);
                }
                Err(e) => log::warn!("skipping {}: {e}", path.display()),
            }
        }
        Ok(catalog)
    }

    fn insert_log(&mut self, log_id: String, snapshot: ModelSnapshot) -> SnapshotId {
        let id = snapshot.id().clone();
        self.snapshots
            .entry(id.clone())
            .or_insert_with(|| Arc::new(snapshot));
        self.logs.insert(
            log_id,
            LogEntry {
                initial: id.clone(),
                lineage: BTreeSet::from([id.clone()]),
                checkpoints: CheckpointStore::new(),
            },
        );
        id
    }

    /// Registers a log with its initial snapshot. Returns the new log id.
    pub fn add_log(&mut self, snapshot: ModelSnapshot) -> io::Result<(String, SnapshotId)> {
        let log_id = format!("log-{}", self.next_log);
        if let Some(dir) = &self.state_dir {
            fs::write(dir.join(format!("{log_id}.jsonl")), write_jsonl(snapshot.log()))?;
        }
        self.next_log += 1;
        let id = self.insert_log(log_id.clone(), snapshot);
        Ok((log_id, id))
    }

    pub fn snapshot(&self, id: &str) -> Result<Arc<ModelSnapshot>, ApiError> {
        self.snapshots
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("snapshot {id}")))
    }

    /// Adds a snapshot derived from `parent` to every log `parent` belongs to.
    pub fn add_derived(&mut self, parent: &SnapshotId, snapshot: ModelSnapshot) -> SnapshotId {
        let id = snapshot.id().clone();
        self.snapshots
            .entry(id.clone())
            .or_insert_with(|| Arc::new(snapshot));
        for entry in self.logs.values_mut() {
            if entry.lineage.contains(parent) {
                entry.lineage.insert(id.clone());
            }
        }
        id
    }

    fn log_entry(&self, log_id: &str) -> Result<&LogEntry, ApiError> {
        self.logs
            .get(log_id)
            .ok_or_else(|| ApiError::not_found(format!("log {log_id}")))
    }

    pub fn initial_snapshot(&self, log_id: &str) -> Result<SnapshotId, ApiError> {
        Ok(self.log_entry(log_id)?.initial.clone())
    }

    pub fn checkpoint_names(&self, log_id: &str) -> Result<Vec<String>, ApiError> {
        Ok(self.log_entry(log_id)?.checkpoints.names().map(str::to_string).collect())
    }

    pub fn save_checkpoint(&mut self, log_id: &str, name: &str, snapshot_id: &str) -> Result<(), ApiError> {
        let snapshot = self.snapshot(snapshot_id)?;
        let entry = self
            .logs
            .get_mut(log_id)
            .ok_or_else(|| ApiError::not_found(format!("log {log_id}")))?;
        if !entry.lineage.contains(snapshot.id()) {
            return Err(ApiError::unprocessable(
                "foreignSnapshot",
                format!("snapshot {snapshot_id} does not derive from log {log_id}"),
            ));
        }
        entry.checkpoints.save(name, snapshot)?;
        Ok(())
    }

    pub fn reset(&self, log_id: &str, name: &str) -> Result<SnapshotId, ApiError> {
        Ok(self.log_entry(log_id)?.checkpoints.reset(name)?.id().clone())
    }
}

impl From<&DbEventLog> for SessionCatalog {
    /// A catalog holding `log` as `log-0`, without persistence.
    fn from(log: &DbEventLog) -> Self {
        let mut catalog = Self::new();
        catalog
            .add_log(ModelSnapshot::build(log.clone()))
            .expect("no state dir, no io");
        catalog
    }
}
