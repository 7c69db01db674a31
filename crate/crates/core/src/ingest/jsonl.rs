//! Canonical line-delimited JSON format.
//!
//! ```text
//! {"kind":"object","id":"o1","class":"order"}
//! {"kind":"event","id":"e1","activity":"A","timestamp":100,"objects":["o1"],"attrs":{"who":"ann"}}
//! ```
//!
//! Records may come in any order; references are resolved after the whole
//! stream has been read. Blank lines are skipped.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{parse_timestamp, Issue, IssueCode, Location, RawEvent, RawLog, RawObject};
use crate::error::IngestError;
use crate::model::{Attributes, DbEventLog};

#[derive(Deserialize)]
#[serde(untagged)]
enum TimestampRepr {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
struct ObjectRecord {
    id: String,
    class: Option<String>,
}

#[derive(Deserialize)]
struct EventRecord {
    id: String,
    activity: Option<String>,
    timestamp: Option<TimestampRepr>,
    #[serde(default)]
    objects: Vec<String>,
    #[serde(default)]
    attrs: Attributes,
}

const OBJECT_KEYS: &[&str] = &["kind", "id", "class"];
const EVENT_KEYS: &[&str] = &["kind", "id", "activity", "timestamp", "objects", "attrs"];

pub fn parse_jsonl(bytes: &[u8]) -> Result<DbEventLog, IngestError> {
    parse_jsonl_raw(bytes)?.into_log().map(|(log, _)| log)
}

pub fn parse_jsonl_raw(bytes: &[u8]) -> Result<RawLog, IngestError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let location = Location::of_offset(bytes, e.valid_up_to());
        IngestError::Parse {
            location,
            message: "input is not valid UTF-8".into(),
        }
    })?;

    let mut raw = RawLog::default();
    for (idx, line) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let location = Location::line(line_no);
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(line).map_err(|e| IngestError::Parse {
            location: Location::at(line_no, e.column()),
            message: e.to_string(),
        })?;
        let schema = |message: String| IngestError::Schema { location, message };
        let Value::Object(record) = value else {
            return Err(schema("record is not a JSON object".into()));
        };
        let kind = match record.get("kind") {
            Some(Value::String(kind)) => kind.clone(),
            Some(_) => return Err(schema("\"kind\" must be a string".into())),
            None => return Err(schema("record without \"kind\"".into())),
        };
        match kind.as_str() {
            "object" => {
                note_unknown_keys(&mut raw, &record, OBJECT_KEYS, location);
                let rec: ObjectRecord =
                    serde_json::from_value(Value::Object(record)).map_err(|e| schema(e.to_string()))?;
                raw.objects.push(RawObject {
                    id: rec.id,
                    class: rec.class,
                    location,
                });
            }
            "event" => {
                note_unknown_keys(&mut raw, &record, EVENT_KEYS, location);
                let rec: EventRecord =
                    serde_json::from_value(Value::Object(record)).map_err(|e| schema(e.to_string()))?;
                let timestamp = match rec.timestamp {
                    None => None,
                    Some(TimestampRepr::Int(t)) => Some(t),
                    Some(TimestampRepr::Text(s)) => Some(
                        parse_timestamp(&s)
                            .ok_or_else(|| schema(format!("event {}: unreadable timestamp {s:?}", rec.id)))?,
                    ),
                };
                let mut objects = Vec::with_capacity(rec.objects.len());
                for o in rec.objects {
                    if !objects.contains(&o) {
                        objects.push(o);
                    }
                }
                raw.events.push(RawEvent {
                    id: rec.id,
                    activity: rec.activity,
                    timestamp,
                    attributes: rec.attrs,
                    objects,
                    location,
                });
            }
            other => return Err(schema(format!("unknown record kind {other:?}"))),
        }
    }
    Ok(raw)
}

fn note_unknown_keys(raw: &mut RawLog, record: &Map<String, Value>, known: &[&str], location: Location) {
    for key in record.keys().filter(|k| !known.contains(&k.as_str())) {
        raw.notes
            .push(Issue::new(IssueCode::IgnoredContent, format!("ignored key {key:?}"), location));
    }
}

#[derive(Serialize)]
#[serde(tag = "kind", rename = "object")]
struct ObjectOut<'a> {
    id: &'a str,
    class: &'a str,
}

#[derive(Serialize)]
struct EventOut<'a> {
    kind: &'static str,
    id: &'a str,
    activity: &'a str,
    timestamp: i64,
    objects: Vec<&'a str>,
    #[serde(skip_serializing_if = "Attributes::is_empty")]
    attrs: &'a Attributes,
}

/// Objects first (sorted by id), then events in the total order.
pub fn write_jsonl(log: &DbEventLog) -> String {
    let mut out = String::new();
    for o in log.objects() {
        let rec = ObjectOut {
            id: o.id.as_str(),
            class: o.class.as_str(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("serializable"));
        out.push('\n');
    }
    for (pos, e) in log.events().iter().enumerate() {
        let rec = EventOut {
            kind: "event",
            id: e.id.as_str(),
            activity: e.activity.as_str(),
            timestamp: e.timestamp,
            objects: log
                .event_object_positions(pos)
                .iter()
                .map(|&o| log.objects()[o].id.as_str())
                .collect(),
            attrs: &e.attributes,
        };
        out.push_str(&serde_json::to_string(&rec).expect("serializable"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fixtures, AttrValue};

    const L1: &str = r#"{"kind":"event","id":"e1","activity":"A","timestamp":100,"objects":["o1"]}
{"kind":"event","id":"e2","activity":"B","timestamp":200,"objects":["o1","o2"]}
{"kind":"object","id":"o1","class":"order"}
{"kind":"event","id":"e3","activity":"C","timestamp":300,"objects":["o1"]}
{"kind":"event","id":"e4","activity":"B","timestamp":400,"objects":["o2"]}
{"kind":"object","id":"o2","class":"item"}
"#;

    #[test]
    fn parses_l1_with_forward_references() {
        assert_eq!(parse_jsonl(L1.as_bytes()).unwrap(), fixtures::l1());
    }

    #[test]
    fn record_order_does_not_matter() {
        let mut lines: Vec<&str> = L1.lines().collect();
        lines.reverse();
        assert_eq!(parse_jsonl(lines.join("\n").as_bytes()).unwrap(), fixtures::l1());
    }

    #[test]
    fn empty_input() {
        assert!(parse_jsonl(b"").unwrap().is_empty());
        assert!(parse_jsonl(b"\n\n").unwrap().is_empty());
    }

    #[test]
    fn unknown_kind() {
        let line = br#"{"kind":"evnt","id":"e1"}"#;
        assert!(matches!(parse_jsonl(line), Err(IngestError::Schema { .. })));
        assert!(matches!(parse_jsonl(br#"{"id":"e1"}"#), Err(IngestError::Schema { .. })));
        assert!(matches!(parse_jsonl(b"[1,2]"), Err(IngestError::Schema { .. })));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "{\"kind\":\"object\",\"id\":\"o1\",\"class\":\"x\"}\n{\"kind\": oops}\n";
        match parse_jsonl(text.as_bytes()) {
            Err(IngestError::Parse { location, .. }) => assert_eq!(location.line, Some(2)),
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn wrong_field_types_are_schema_errors() {
        let text = r#"{"kind":"event","id":7,"activity":"A","timestamp":1}"#;
        assert!(matches!(parse_jsonl(text.as_bytes()), Err(IngestError::Schema { .. })));
        let text = r#"{"kind":"event","id":"e","activity":"A","timestamp":1,"attrs":{"x":[1]}}"#;
        assert!(matches!(parse_jsonl(text.as_bytes()), Err(IngestError::Schema { .. })));
    }

    #[test]
    fn dangling_and_duplicates() {
        let text = r#"{"kind":"event","id":"e1","activity":"A","timestamp":1,"objects":["oX"]}"#;
        assert!(matches!(parse_jsonl(text.as_bytes()), Err(IngestError::DanglingRef { .. })));
        let text = "{\"kind\":\"object\",\"id\":\"o\",\"class\":\"c\"}\n{\"kind\":\"object\",\"id\":\"o\",\"class\":\"c\"}";
        assert!(matches!(parse_jsonl(text.as_bytes()), Err(IngestError::DuplicateId { .. })));
    }

    #[test]
    fn iso_timestamps_and_attributes() {
        let text = r#"{"kind":"event","id":"e1","activity":"A","timestamp":"1970-01-01T00:00:02Z","attrs":{"n":3,"x":1.5,"ok":false,"who":"ann"},"extra":1}"#;
        let raw = parse_jsonl_raw(text.as_bytes()).unwrap();
        assert_eq!(raw.notes.len(), 1);
        let log = raw.into_log().unwrap().0;
        let e = log.event("e1").unwrap();
        assert_eq!(e.timestamp, 2000);
        assert_eq!(e.attributes["n"], AttrValue::Int(3));
        assert_eq!(e.attributes["x"], AttrValue::Float(1.5));
        assert_eq!(e.attributes["ok"], AttrValue::Bool(false));
        assert_eq!(e.attributes["who"], AttrValue::Text("ann".into()));
        assert_eq!(parse_jsonl(write_jsonl(&log).as_bytes()).unwrap(), log);
    }

    #[test]
    fn writer_is_canonical() {
        let text = write_jsonl(&fixtures::l1());
        assert_eq!(text.lines().count(), 6);
        assert_eq!(text.lines().next().unwrap(), r#"{"kind":"object","id":"o1","class":"order"}"#);
        assert_eq!(parse_jsonl(text.as_bytes()).unwrap(), fixtures::l1());
    }
}
