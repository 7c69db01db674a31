use thiserror::Error;

use crate::ingest::Location;
use crate::model::{CaseId, EventId, ObjectId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("empty {0}")]
    EmptyId(&'static str),
    #[error("{0} not found")]
    NotFound(String),
    #[error("k = {k} out of range for object {object} with {len} related events")]
    OutOfRange { object: String, k: usize, len: usize },
    #[error("duplicate event id {0}")]
    DuplicateEvent(EventId),
    #[error("duplicate object id {0}")]
    DuplicateObject(ObjectId),
    #[error("pair ({0}, {1}) references an unknown event")]
    DanglingEvent(EventId, ObjectId),
    #[error("event {0} references undeclared object {1}")]
    DanglingObject(EventId, ObjectId),
    #[error("case {0} has no events")]
    EmptyCase(CaseId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("parse error at {location}: {message}")]
    Parse { location: Location, message: String },
    #[error("schema error at {location}: {message}")]
    Schema { location: Location, message: String },
    #[error("duplicate id {id} at {location}")]
    DuplicateId { id: String, location: Location },
    #[error("event {event} references undeclared object {object} at {location}")]
    DanglingRef {
        event: String,
        object: String,
        location: Location,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterError {
    #[error("{0} not found")]
    NotFound(String),
    #[error("invalid filter: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("similarity is undefined for two empty event sets")]
    Undefined,
    #[error("class {0} has no object with related events")]
    EmptyPerspective(String),
    #[error("invalid projection parameters: {0}")]
    InvalidParams(String),
    #[error("case {case} references unknown event {event}")]
    DanglingRef { case: String, event: String },
    #[error("projection cancelled")]
    Cancelled,
}
