//! Turning external event-data files into a validated [`DbEventLog`].
//!
//! Both parsers first produce a [`RawLog`], which can hold everything a
//! malformed input might contain (repeated ids, missing timestamps, dangling
//! references). [`validate`] inspects a raw log and [`RawLog::into_log`]
//! only succeeds when the report carries no errors.

mod jsonl;
mod xoc;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::Serialize;

use crate::error::IngestError;
use crate::model::{Activity, Attributes, DbEventLog, Event, EventId, ObjectClass, ObjectEntry, ObjectId};

pub use jsonl::{parse_jsonl, parse_jsonl_raw, write_jsonl};
pub use xoc::{parse_xoc, parse_xoc_raw, write_xoc};

/// Position in the source document. Lines and columns are 1-based.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Location {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl Location {
    pub fn line(line: usize) -> Self {
        Self {
            line: Some(line),
            column: None,
        }
    }

    pub fn at(line: usize, column: usize) -> Self {
        Self {
            line: Some(line),
            column: Some(column),
        }
    }

    /// Line and column of a byte offset within `source`.
    pub fn of_offset(source: &[u8], offset: usize) -> Self {
        let offset = offset.min(source.len());
        let before = &source[..offset];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        let column = String::from_utf8_lossy(&before[line_start..]).chars().count() + 1;
        Self::at(line, column)
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}"),
            (Some(l), None) => write!(f, "line {l}"),
            _ => f.write_str("unknown location"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum IssueCode {
    DuplicateId,
    DanglingRef,
    EmptyId,
    MissingTimestamp,
    MissingActivity,
    MissingClass,
    EventlessObject,
    ObjectlessEvent,
    IgnoredContent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub code: IssueCode,
    pub message: String,
    pub location: Location,
    /// Id of the offending event or object, when there is one.
    #[serde(skip)]
    pub subject: Option<String>,
    /// For dangling references, the missing object id.
    #[serde(skip)]
    pub target: Option<String>,
}

impl Issue {
    pub fn new(code: IssueCode, message: impl Into<String>, location: Location) -> Self {
        Self {
            code,
            message: message.into(),
            location,
            subject: None,
            target: None,
        }
    }

    fn about(mut self, subject: &str) -> Self {
        self.subject = Some(subject.to_string());
        self
    }

    fn into_error(self) -> IngestError {
        let location = self.location;
        match self.code {
            IssueCode::DuplicateId => IngestError::DuplicateId {
                id: self.subject.unwrap_or_default(),
                location,
            },
            IssueCode::DanglingRef => IngestError::DanglingRef {
                event: self.subject.unwrap_or_default(),
                object: self.target.unwrap_or_default(),
                location,
            },
            _ => IngestError::Schema {
                location,
                message: self.message,
            },
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location.line {
            Some(_) => write!(f, "{}: {}", self.location, self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawEvent {
    pub id: String,
    pub activity: Option<String>,
    pub timestamp: Option<i64>,
    pub attributes: Attributes,
    pub objects: Vec<String>,
    pub location: Location,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawObject {
    pub id: String,
    pub class: Option<String>,
    pub location: Location,
}

/// Parsed but not yet validated event data.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawLog {
    pub events: Vec<RawEvent>,
    pub objects: Vec<RawObject>,
    /// Warnings raised while parsing (ignored elements and keys).
    pub notes: Vec<Issue>,
}

impl RawLog {
    pub fn from_log(log: &DbEventLog) -> Self {
        let events = log
            .events()
            .iter()
            .enumerate()
            .map(|(pos, e)| RawEvent {
                id: e.id.to_string(),
                activity: Some(e.activity.to_string()),
                timestamp: Some(e.timestamp),
                attributes: e.attributes.clone(),
                objects: log
                    .event_object_positions(pos)
                    .iter()
                    .map(|&o| log.objects()[o].id.to_string())
                    .collect(),
                location: Location::default(),
            })
            .collect();
        let objects = log
            .objects()
            .iter()
            .map(|o| RawObject {
                id: o.id.to_string(),
                class: Some(o.class.to_string()),
                location: Location::default(),
            })
            .collect();
        Self {
            events,
            objects,
            notes: Vec::new(),
        }
    }

    /// Validates and, when there are no errors, builds the log. Otherwise
    /// the first error of the report (object declarations are checked
    /// before events) is returned.
    pub fn into_log(self) -> Result<(DbEventLog, ValidationReport), IngestError> {
        let report = validate(&self);
        if let Some(first) = report.errors.first() {
            return Err(first.clone().into_error());
        }
        let build = || -> Result<DbEventLog, crate::error::ModelError> {
            let mut pairs = Vec::new();
            let mut events = Vec::with_capacity(self.events.len());
            for raw in self.events {
                let id = EventId::new(raw.id)?;
                for o in raw.objects {
                    pairs.push((id.clone(), ObjectId::new(o)?));
                }
                let mut event = Event::new(
                    id,
                    Activity::new(raw.activity.unwrap_or_default())?,
                    raw.timestamp.unwrap_or_default(),
                );
                event.attributes = raw.attributes;
                events.push(event);
            }
            let objects = self
                .objects
                .into_iter()
                .map(|o| {
                    Ok(ObjectEntry {
                        id: ObjectId::new(o.id)?,
                        class: ObjectClass::new(o.class.unwrap_or_default())?,
                    })
                })
                .collect::<Result<Vec<_>, crate::error::ModelError>>()?;
            DbEventLog::new(events, objects, pairs)
        };
        let log = build().map_err(|e| IngestError::Schema {
            location: Location::default(),
            message: e.to_string(),
        })?;
        Ok((log, report))
    }
}

/// Errors: repeated ids, dangling references, missing mandatory fields.
/// Warnings: objects without events, events without objects, plus whatever
/// the parser chose to ignore.
pub fn validate(raw: &RawLog) -> ValidationReport {
    let mut report = ValidationReport {
        errors: Vec::new(),
        warnings: raw.notes.clone(),
    };

    let mut declared: HashMap<&str, usize> = HashMap::new();
    for o in &raw.objects {
        if o.id.is_empty() {
            report
                .errors
                .push(Issue::new(IssueCode::EmptyId, "object with empty id", o.location));
            continue;
        }
        if declared.insert(o.id.as_str(), 0).is_some() {
            report.errors.push(
                Issue::new(IssueCode::DuplicateId, format!("object id {} declared twice", o.id), o.location)
                    .about(&o.id),
            );
        }
        match o.class.as_deref() {
            None | Some("") => report.errors.push(
                Issue::new(IssueCode::MissingClass, format!("object {} has no class", o.id), o.location)
                    .about(&o.id),
            ),
            Some(_) => {}
        }
    }

    let mut seen_events: HashSet<&str> = HashSet::new();
    for e in &raw.events {
        if e.id.is_empty() {
            report
                .errors
                .push(Issue::new(IssueCode::EmptyId, "event with empty id", e.location));
        } else if !seen_events.insert(e.id.as_str()) {
            report.errors.push(
                Issue::new(IssueCode::DuplicateId, format!("event id {} declared twice", e.id), e.location)
                    .about(&e.id),
            );
        }
        match e.activity.as_deref() {
            None | Some("") => report.errors.push(
                Issue::new(IssueCode::MissingActivity, format!("event {} has no activity", e.id), e.location)
                    .about(&e.id),
            ),
            Some(_) => {}
        }
        if e.timestamp.is_none() {
            report.errors.push(
                Issue::new(IssueCode::MissingTimestamp, format!("event {} has no timestamp", e.id), e.location)
                    .about(&e.id),
            );
        }
        for o in &e.objects {
            match declared.get_mut(o.as_str()) {
                Some(n) => *n += 1,
                None => {
                    let mut issue = Issue::new(
                        IssueCode::DanglingRef,
                        format!("event {} references undeclared object {o}", e.id),
                        e.location,
                    )
                    .about(&e.id);
                    issue.target = Some(o.clone());
                    report.errors.push(issue);
                }
            }
        }
        if e.objects.is_empty() {
            report.warnings.push(
                Issue::new(IssueCode::ObjectlessEvent, format!("event {} relates to no object", e.id), e.location)
                    .about(&e.id),
            );
        }
    }

    for o in &raw.objects {
        if declared.get(o.id.as_str()) == Some(&0) {
            report.warnings.push(
                Issue::new(IssueCode::EventlessObject, format!("object {} relates to no event", o.id), o.location)
                    .about(&o.id),
            );
        }
    }
    report
}

/// Validation of an already built log: only warnings can arise.
pub fn validate_log(log: &DbEventLog) -> ValidationReport {
    validate(&RawLog::from_log(log))
}

/// Integer time units pass through unchanged; ISO-8601 date-times become
/// milliseconds since the epoch (UTC when no offset is given).
pub fn parse_timestamp(text: &str) -> Option<i64> {
    let text = text.trim();
    if let Ok(n) = text.parse::<i64>() {
        return Some(n);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        return Some(dt.timestamp_millis());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(text, fmt) {
            return Some(dt.and_utc().timestamp_millis());
        }
    }
    NaiveDate::parse_from_str(text, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|dt| dt.and_utc().timestamp_millis())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Xoc,
    Jsonl,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "xoc" | "xml" => Some(Format::Xoc),
            "jsonl" | "ndjson" => Some(Format::Jsonl),
            _ => None,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "xoc" => Ok(Format::Xoc),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!("unknown format {other:?} (expected xoc or jsonl)")),
        }
    }
}

/// Parses with the given format, returning the log and its report.
pub fn parse(bytes: &[u8], format: Format) -> Result<(DbEventLog, ValidationReport), IngestError> {
    match format {
        Format::Xoc => parse_xoc_raw(bytes)?.into_log(),
        Format::Jsonl => parse_jsonl_raw(bytes)?.into_log(),
    }
}
