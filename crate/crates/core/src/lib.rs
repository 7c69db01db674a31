//! StarStar models over event data extracted from databases.
//!
//! An event log in a database context ([`DbEventLog`]) relates events to the
//! objects they touch, with no case notion fixed up front. From it this crate
//! builds three graphs:
//!
//! * the event-to-object graph (E2O), which mirrors the event-object relation,
//! * the event-to-event multigraph (E2E), with one directly-follows edge per
//!   pair of consecutive events of an object,
//! * the activities multigraph (A2A), which aggregates E2E edges per object
//!   class and activity pair.
//!
//! The A2A multigraph can be filtered interactively ([`filter`]) and any
//! object class can be projected down to a classic, case-grouped event log
//! ([`projection`]) for use with mainstream process mining tools.
//!
//! ```text
//! XOC / JSONL > ingest > DbEventLog > ModelSnapshot { E2O, E2E, A2A }
//!                                     - view filters, edge drill-down
//!                                     - case notion > ClassicEventLog > XES / CSV
//! ```

pub mod bench;
pub mod error;
pub mod filter;
pub mod graphs;
pub mod ingest;
pub mod model;
pub mod projection;
pub mod synthetic;

pub use error::{FilterError, IngestError, ModelError, ProjectionError};
pub use graphs::{A2AEdge, A2AMultigraph, E2EEdge, E2EMultigraph, E2OGraph, EdgeKey, Metric, ModelSnapshot, SnapshotId};
pub use model::{
    compare_events, Activity, AttrValue, Case, CaseId, ClassicEventLog, DbEventLog, Event, EventId, ObjectClass,
    ObjectEntry, ObjectId,
};
