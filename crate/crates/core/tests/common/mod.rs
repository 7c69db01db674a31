#![allow(dead_code)]

use starstar_core::{Activity, DbEventLog, Event, EventId, ObjectClass, ObjectEntry, ObjectId};
use starstar_oracle::PlainLog;

pub fn to_log(plain: &PlainLog) -> DbEventLog {
    let events = plain
        .events
        .iter()
        .map(|e| Event::new(EventId::new(&e.id).unwrap(), Activity::new(&e.activity).unwrap(), e.time))
        .collect();
    let objects = plain
        .objects
        .iter()
        .map(|(id, class)| ObjectEntry {
            id: ObjectId::new(id).unwrap(),
            class: ObjectClass::new(class).unwrap(),
        })
        .collect();
    let eo = plain
        .eo
        .iter()
        .map(|(e, o)| (EventId::new(e).unwrap(), ObjectId::new(o).unwrap()));
    DbEventLog::new(events, objects, eo).unwrap()
}

pub const TOL: f64 = 1e-9;

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}
