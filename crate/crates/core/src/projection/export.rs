use std::fmt::Write as _;

use chrono::{DateTime, SecondsFormat};
use quick_xml::escape::escape;

use crate::model::{AttrValue, Case, ClassicEventLog, Event};

/// Milliseconds since the epoch as ISO-8601 UTC with millisecond precision.
/// Values outside chrono's range fall back to the raw integer.
pub fn format_timestamp(ms: i64) -> String {
    match DateTime::from_timestamp_millis(ms) {
        Some(t) => t.to_rfc3339_opts(SecondsFormat::Millis, true),
        None => ms.to_string(),
    }
}

fn sorted_traces(clog: &ClassicEventLog) -> Vec<(&Case, Vec<&Event>)> {
    let mut traces: Vec<_> = clog.traces().collect();
    traces.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    traces
}

fn xes_attribute(out: &mut String, indent: &str, key: &str, value: &AttrValue) {
    let (tag, text) = match value {
        AttrValue::Bool(b) => ("boolean", b.to_string()),
        AttrValue::Int(i) => ("int", i.to_string()),
        AttrValue::Float(f) => ("float", f.to_string()),
        AttrValue::Text(s) => ("string", s.clone()),
    };
    let _ = writeln!(out, "{indent}<{tag} key=\"{}\" value=\"{}\"/>", escape(key), escape(&text));
}

/// XES 1.0 document with the concept and time extensions. Traces are
/// sorted by case id, events within a trace by the log order. An event
/// shared by several cases is repeated in each trace.
pub fn write_xes(clog: &ClassicEventLog) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<log xes.version=\"1.0\" xes.features=\"\" xmlns=\"http://www.xes-standard.org/\">\n");
    out.push_str("\t<extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n");
    out.push_str("\t<extension name=\"Time\" prefix=\"time\" uri=\"http://www.xes-standard.org/time.xesext\"/>\n");
    out.push_str("\t<classifier name=\"Activity\" keys=\"concept:name\"/>\n");
    for (case, trace) in sorted_traces(clog) {
        out.push_str("\t<trace>\n");
        let _ = writeln!(out, "\t\t<string key=\"concept:name\" value=\"{}\"/>", escape(case.id.as_str()));
        for e in trace {
            out.push_str("\t\t<event>\n");
            let _ = writeln!(out, "\t\t\t<string key=\"concept:name\" value=\"{}\"/>", escape(e.activity.as_str()));
            let _ = writeln!(out, "\t\t\t<date key=\"time:timestamp\" value=\"{}\"/>", format_timestamp(e.timestamp));
            let _ = writeln!(out, "\t\t\t<string key=\"event:id\" value=\"{}\"/>", escape(e.id.as_str()));
            for (key, value) in &e.attributes {
                if matches!(key.as_str(), "concept:name" | "time:timestamp" | "event:id") {
                    continue;
                }
                xes_attribute(&mut out, "\t\t\t", key, value);
            }
            out.push_str("\t\t</event>\n");
        }
        out.push_str("\t</trace>\n");
    }
    out.push_str("</log>\n");
    out
}

/// `case_id,event_id,activity,timestamp` rows sorted by case id, then by
/// the log order.
pub fn write_csv(clog: &ClassicEventLog) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["case_id", "event_id", "activity", "timestamp"])
        .expect("writing to memory");
    for (case, trace) in sorted_traces(clog) {
        for e in trace {
            writer
                .write_record([
                    case.id.as_str(),
                    e.id.as_str(),
                    e.activity.as_str(),
                    &format_timestamp(e.timestamp),
                ])
                .expect("writing to memory");
        }
    }
    let bytes = writer.into_inner().expect("writing to memory");
    String::from_utf8(bytes).expect("csv output from UTF-8 input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fixtures, ObjectClass};
    use crate::projection::{case_notion, project, ProjectionParams};

    fn l1_projection() -> ClassicEventLog {
        let log = fixtures::l1();
        let params = ProjectionParams::new(ObjectClass::new("order").unwrap(), 0.2, 0).unwrap();
        project(&log, case_notion(&log, &params).unwrap()).unwrap()
    }

    #[test]
    fn timestamps() {
        assert_eq!(format_timestamp(0), "1970-01-01T00:00:00.000Z");
        assert_eq!(format_timestamp(1_500), "1970-01-01T00:00:01.500Z");
        assert_eq!(format_timestamp(i64::MAX), i64::MAX.to_string());
    }

    #[test]
    fn xes_of_l1() {
        let xes = write_xes(&l1_projection());
        assert_eq!(xes.matches("<trace>").count(), 1);
        assert_eq!(xes.matches("<event>").count(), 4);
        let acts: Vec<&str> = xes
            .lines()
            .filter(|l| l.starts_with("\t\t\t<string key=\"concept:name\""))
            .map(|l| l.split('"').nth(3).unwrap())
            .collect();
        assert_eq!(acts, ["A", "B", "C", "B"]);
        assert!(xes.contains("<string key=\"concept:name\" value=\"c:o1\"/>"));
        assert_eq!(xes, write_xes(&l1_projection()));
    }

    #[test]
    fn empty_xes() {
        let xes = write_xes(&ClassicEventLog::default());
        assert!(xes.contains("<log "));
        assert!(!xes.contains("<trace>"));
    }

    #[test]
    fn csv_of_l1() {
        let csv = write_csv(&l1_projection());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "case_id,event_id,activity,timestamp");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("c:o1,e1,A,"));
    }
}
