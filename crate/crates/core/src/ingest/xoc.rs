//! XOC subset reader and writer.
//!
//! Accepted shape:
//!
//! ```xml
//! <log>
//!   <events>
//!     <event id="e1" activity="A" timestamp="100">
//!       <objects><object ref="o1"/></objects>
//!       <string key="resource" value="alice"/>
//!     </event>
//!   </events>
//!   <objects>
//!     <object id="o1" class="order"/>
//!   </objects>
//! </log>
//! ```
//!
//! Timestamps are integers or ISO-8601 date-times. Event attributes use
//! XES-style typed elements (`string`, `int`, `float`, `boolean`). Anything
//! else, such as per-event object-model snapshots, is skipped with a warning.

use std::borrow::Cow;
use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event as XmlEvent};
use quick_xml::Reader;

use super::{parse_timestamp, Issue, IssueCode, Location, RawEvent, RawLog, RawObject};
use crate::error::IngestError;
use crate::model::{AttrValue, DbEventLog};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Root,
    Log,
    Events,
    Event,
    EventObjects,
    Objects,
    Leaf,
    Skip,
}

struct XocParser<'a> {
    source: &'a [u8],
    raw: RawLog,
    saw_log: bool,
}

pub fn parse_xoc(bytes: &[u8]) -> Result<DbEventLog, IngestError> {
    parse_xoc_raw(bytes)?.into_log().map(|(log, _)| log)
}

pub fn parse_xoc_raw(bytes: &[u8]) -> Result<RawLog, IngestError> {
    XocParser {
        source: bytes,
        raw: RawLog::default(),
        saw_log: false,
    }
    .run()
}

impl<'a> XocParser<'a> {
    fn location(&self, offset: u64) -> Location {
        Location::of_offset(self.source, offset as usize)
    }

    fn parse_error(&self, offset: u64, message: impl Into<String>) -> IngestError {
        IngestError::Parse {
            location: self.location(offset),
            message: message.into(),
        }
    }

    fn schema_error(&self, offset: u64, message: impl Into<String>) -> IngestError {
        IngestError::Schema {
            location: self.location(offset),
            message: message.into(),
        }
    }

    fn ignore(&mut self, offset: u64, what: String) {
        let location = self.location(offset);
        self.raw
            .notes
            .push(Issue::new(IssueCode::IgnoredContent, format!("ignored {what}"), location));
    }

    fn run(mut self) -> Result<RawLog, IngestError> {
        let mut reader = Reader::from_reader(self.source);
        reader.config_mut().trim_text(true);
        let mut stack = vec![Ctx::Root];

        loop {
            let event = match reader.read_event() {
                Ok(ev) => ev,
                Err(err) => return Err(self.parse_error(reader.error_position(), err.to_string())),
            };
            let offset = reader.buffer_position();
            match event {
                XmlEvent::Start(start) => {
                    let parent = *stack.last().expect("root context");
                    let ctx = self.open(parent, &start, offset)?;
                    stack.push(ctx);
                }
                XmlEvent::Empty(start) => {
                    let parent = *stack.last().expect("root context");
                    self.open(parent, &start, offset)?;
                }
                XmlEvent::End(_) => {
                    stack.pop();
                }
                XmlEvent::Eof => break,
                // Text, comments, declarations, processing instructions.
                _ => {}
            }
        }
        if stack.len() != 1 {
            return Err(self.parse_error(reader.buffer_position(), "unexpected end of document"));
        }
        if !self.saw_log {
            return Err(self.schema_error(reader.buffer_position(), "missing <log> root element"));
        }
        Ok(self.raw)
    }

    fn open(&mut self, parent: Ctx, start: &BytesStart<'_>, offset: u64) -> Result<Ctx, IngestError> {
        let name = String::from_utf8_lossy(start.name().as_ref()).into_owned();
        let ctx = match (parent, name.as_str()) {
            (Ctx::Root, "log") => {
                self.saw_log = true;
                Ctx::Log
            }
            (Ctx::Root, other) => {
                return Err(self.schema_error(offset, format!("root element must be <log>, found <{other}>")));
            }
            (Ctx::Log, "events") => Ctx::Events,
            (Ctx::Log, "objects") => Ctx::Objects,
            (Ctx::Events, "event") => {
                let event = self.read_event(start, offset)?;
                self.raw.events.push(event);
                Ctx::Event
            }
            (Ctx::Event, "objects") => Ctx::EventObjects,
            (Ctx::Event, "string" | "int" | "float" | "boolean") => {
                self.read_attribute(&name, start, offset)?;
                Ctx::Leaf
            }
            (Ctx::EventObjects, "object") => {
                let attrs = self.attributes(start, offset, &["ref"])?;
                let reference = lookup(&attrs, "ref")
                    .ok_or_else(|| self.schema_error(offset, "object reference without ref attribute"))?;
                let event = self.raw.events.last_mut().expect("inside an event");
                if !event.objects.contains(&reference) {
                    event.objects.push(reference);
                }
                Ctx::Leaf
            }
            (Ctx::Objects, "object") => {
                let attrs = self.attributes(start, offset, &["id", "class"])?;
                let id = lookup(&attrs, "id")
                    .ok_or_else(|| self.schema_error(offset, "object declaration without id"))?;
                self.raw.objects.push(RawObject {
                    id,
                    class: lookup(&attrs, "class"),
                    location: self.location(offset),
                });
                Ctx::Leaf
            }
            (Ctx::Skip, _) => Ctx::Skip,
            (_, other) => {
                self.ignore(offset, format!("element <{other}>"));
                Ctx::Skip
            }
        };
        Ok(ctx)
    }

    /// Attribute pairs of an element. Names outside `known` produce a
    /// warning and are dropped.
    fn attributes(
        &mut self,
        start: &BytesStart<'_>,
        offset: u64,
        known: &[&str],
    ) -> Result<Vec<(String, String)>, IngestError> {
        let mut out = Vec::new();
        for attr in start.attributes() {
            let attr = attr.map_err(|e| self.parse_error(offset, e.to_string()))?;
            let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
            let value = attr
                .unescape_value()
                .map_err(|e| self.parse_error(offset, e.to_string()))?;
            if known.contains(&key.as_str()) {
                out.push((key, value.into_owned()));
            } else {
                let element = String::from_utf8_lossy(start.name().as_ref()).into_owned();
                self.ignore(offset, format!("attribute {key} on <{element}>"));
            }
        }
        Ok(out)
    }

    fn read_event(&mut self, start: &BytesStart<'_>, offset: u64) -> Result<RawEvent, IngestError> {
        let attrs = self.attributes(start, offset, &["id", "activity", "timestamp"])?;
        let id = lookup(&attrs, "id").ok_or_else(|| self.schema_error(offset, "event without id"))?;
        let timestamp = match lookup(&attrs, "timestamp") {
            Some(text) => Some(parse_timestamp(&text).ok_or_else(|| {
                self.schema_error(offset, format!("event {id}: unreadable timestamp {text:?}"))
            })?),
            None => None,
        };
        Ok(RawEvent {
            id,
            activity: lookup(&attrs, "activity"),
            timestamp,
            attributes: Default::default(),
            objects: Vec::new(),
            location: self.location(offset),
        })
    }

    fn read_attribute(&mut self, kind: &str, start: &BytesStart<'_>, offset: u64) -> Result<(), IngestError> {
        let attrs = self.attributes(start, offset, &["key", "value"])?;
        let (Some(key), Some(text)) = (lookup(&attrs, "key"), lookup(&attrs, "value")) else {
            return Err(self.schema_error(offset, format!("<{kind}> needs key and value")));
        };
        let bad = |this: &Self| this.schema_error(offset, format!("attribute {key}: {text:?} is not a valid {kind}"));
        let value = match kind {
            "int" => AttrValue::Int(text.parse().map_err(|_| bad(self))?),
            "float" => AttrValue::Float(text.parse().map_err(|_| bad(self))?),
            "boolean" => AttrValue::Bool(text.parse().map_err(|_| bad(self))?),
            _ => AttrValue::Text(text.clone()),
        };
        let event = self.raw.events.last_mut().expect("inside an event");
        event.attributes.insert(key, value);
        Ok(())
    }
}

fn lookup(attrs: &[(String, String)], key: &str) -> Option<String> {
    attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone())
}

fn attr(value: &str) -> Cow<'_, str> {
    escape(value)
}

/// Serializes a log in the XOC subset. Events appear in the total order,
/// objects by id; timestamps are written as integers.
pub fn write_xoc(log: &DbEventLog) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<log>\n  <events>\n");
    for (pos, e) in log.events().iter().enumerate() {
        let _ = writeln!(
            out,
            "    <event id=\"{}\" activity=\"{}\" timestamp=\"{}\">",
            attr(e.id.as_str()),
            attr(e.activity.as_str()),
            e.timestamp
        );
        let related = log.event_object_positions(pos);
        if !related.is_empty() {
            out.push_str("      <objects>\n");
            for &o in related {
                let _ = writeln!(out, "        <object ref=\"{}\"/>", attr(log.objects()[o].id.as_str()));
            }
            out.push_str("      </objects>\n");
        }
        for (key, value) in &e.attributes {
            let kind = match value {
                AttrValue::Bool(_) => "boolean",
                AttrValue::Int(_) => "int",
                AttrValue::Float(_) => "float",
                AttrValue::Text(_) => "string",
            };
            let text = match value {
                AttrValue::Float(x) => format!("{x:?}"),
                other => other.to_string(),
            };
            let _ = writeln!(out, "      <{kind} key=\"{}\" value=\"{}\"/>", attr(key), attr(&text));
        }
        out.push_str("    </event>\n");
    }
    out.push_str("  </events>\n  <objects>\n");
    for o in log.objects() {
        let _ = writeln!(
            out,
            "    <object id=\"{}\" class=\"{}\"/>",
            attr(o.id.as_str()),
            attr(o.class.as_str())
        );
    }
    out.push_str("  </objects>\n</log>\n");
    out
}
