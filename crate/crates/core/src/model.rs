//! Event logs in a database context, classic event logs, and the
//! object-level helpers used by every graph builder.
//!
//! A [`DbEventLog`] is immutable once built. Events are stored in the total
//! order (timestamp, then event id), objects sorted by id, and the per-object
//! event lists are precomputed so that [`DbEventLog::related_events`] and
//! friends are slice lookups.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

macro_rules! text_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(value: impl Into<String>) -> Result<Self, ModelError> {
                let value = value.into();
                if value.is_empty() {
                    return Err(ModelError::EmptyId(stringify!($name)));
                }
                Ok(Self(value))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = ModelError;

            fn try_from(value: String) -> Result<Self, Self::Error> {
                Self::new(value)
            }
        }

        impl TryFrom<&str> for $name {
            type Error = ModelError;

            fn try_from(value: &str) -> Result<Self, Self::Error> {
                Self::new(value)
            }
        }

        impl From<$name> for String {
            fn from(value: $name) -> Self {
                value.0
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

text_id!(EventId);
text_id!(ObjectId);
text_id!(ObjectClass);
text_id!(Activity);
text_id!(CaseId);

/// Scalar event attribute value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Bool(b) => write!(f, "{b}"),
            AttrValue::Int(i) => write!(f, "{i}"),
            AttrValue::Float(x) => write!(f, "{x}"),
            AttrValue::Text(s) => f.write_str(s),
        }
    }
}

pub type Attributes = BTreeMap<String, AttrValue>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub id: EventId,
    pub activity: Activity,
    /// Integer time units, uniform within a log (milliseconds since the
    /// epoch unless the producer says otherwise).
    pub timestamp: i64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: Attributes,
}

impl Event {
    pub fn new(id: EventId, activity: Activity, timestamp: i64) -> Self {
        Self {
            id,
            activity,
            timestamp,
            attributes: Attributes::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjectEntry {
    pub id: ObjectId,
    pub class: ObjectClass,
}

/// The total order on events: ascending timestamp, ties broken by event id.
pub fn compare_events(a: &Event, b: &Event) -> Ordering {
    a.timestamp
        .cmp(&b.timestamp)
        .then_with(|| a.id.cmp(&b.id))
}

/// An event log in a database context.
#[derive(Debug, Clone, Default)]
pub struct DbEventLog {
    events: Vec<Event>,
    objects: Vec<ObjectEntry>,
    /// (event position, object position), sorted and deduplicated.
    eo: Vec<(usize, usize)>,
    event_index: HashMap<EventId, usize>,
    object_index: HashMap<ObjectId, usize>,
    /// g(o) as event positions in the total order.
    object_events: Vec<Vec<usize>>,
    /// Object positions per event, ascending.
    event_objects: Vec<Vec<usize>>,
}

impl PartialEq for DbEventLog {
    fn eq(&self, other: &Self) -> bool {
        self.events == other.events && self.objects == other.objects && self.eo == other.eo
    }
}

impl DbEventLog {
    /// Builds a log, checking ids and references. Repeated event-object
    /// pairs collapse into one.
    pub fn new<I>(events: Vec<Event>, objects: Vec<ObjectEntry>, eo: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (EventId, ObjectId)>,
    {
        let mut events = events;
        events.sort_by(compare_events);
        let mut objects = objects;
        objects.sort();
        let mut event_index = HashMap::with_capacity(events.len());
        for (pos, e) in events.iter().enumerate() {
            if event_index.insert(e.id.clone(), pos).is_some() {
                return Err(ModelError::DuplicateEvent(e.id.clone()));
            }
        }
        let mut object_index = HashMap::with_capacity(objects.len());
        for (pos, o) in objects.iter().enumerate() {
            if object_index.insert(o.id.clone(), pos).is_some() {
                return Err(ModelError::DuplicateObject(o.id.clone()));
            }
        }

        let mut pairs = Vec::new();
        for (e, o) in eo {
            let ep = *event_index
                .get(&e)
                .ok_or_else(|| ModelError::DanglingEvent(e.clone(), o.clone()))?;
            let op = *object_index
                .get(&o)
                .ok_or_else(|| ModelError::DanglingObject(e.clone(), o.clone()))?;
            pairs.push((ep, op));
        }
        Ok(Self::from_positions(events, objects, event_index, object_index, pairs))
    }

    fn from_positions(
        events: Vec<Event>,
        objects: Vec<ObjectEntry>,
        event_index: HashMap<EventId, usize>,
        object_index: HashMap<ObjectId, usize>,
        mut eo: Vec<(usize, usize)>,
    ) -> Self {
        eo.sort_unstable();
        eo.dedup();
        let mut event_objects = vec![Vec::new(); events.len()];
        let mut object_events = vec![Vec::new(); objects.len()];
        // eo is sorted by event position, so each object's list comes out in
        // the total order without a further sort.
        for &(e, o) in &eo {
            event_objects[e].push(o);
            object_events[o].push(e);
        }
        Self {
            events,
            objects,
            eo,
            event_index,
            object_index,
            object_events,
            event_objects,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty() && self.objects.is_empty()
    }

    /// Events in the total order.
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Objects sorted by id.
    pub fn objects(&self) -> &[ObjectEntry] {
        &self.objects
    }

    pub fn event(&self, id: &str) -> Option<&Event> {
        self.event_position(id).map(|p| &self.events[p])
    }

    pub fn object(&self, id: &str) -> Option<&ObjectEntry> {
        self.object_position(id).map(|p| &self.objects[p])
    }

    pub fn event_position(&self, id: &str) -> Option<usize> {
        self.event_index.get(id).copied()
    }

    pub fn object_position(&self, id: &str) -> Option<usize> {
        self.object_index.get(id).copied()
    }

    /// Event-object pairs as ids, sorted by event order then object id.
    pub fn eo(&self) -> impl Iterator<Item = (&EventId, &ObjectId)> + '_ {
        self.eo
            .iter()
            .map(|&(e, o)| (&self.events[e].id, &self.objects[o].id))
    }

    pub fn eo_len(&self) -> usize {
        self.eo.len()
    }

    /// g(o) as positions into [`events`](Self::events), in the total order.
    pub fn object_event_positions(&self, object_pos: usize) -> &[usize] {
        &self.object_events[object_pos]
    }

    /// Positions of objects related to an event, ascending by object id.
    pub fn event_object_positions(&self, event_pos: usize) -> &[usize] {
        &self.event_objects[event_pos]
    }

    fn require_object(&self, o: &str) -> Result<usize, ModelError> {
        self.object_position(o)
            .ok_or_else(|| ModelError::NotFound(format!("object {o}")))
    }

    /// g(o): events related to `o`, ordered by [`compare_events`].
    pub fn related_events(&self, o: &str) -> Result<Vec<&EventId>, ModelError> {
        let pos = self.require_object(o)?;
        Ok(self.object_events[pos]
            .iter()
            .map(|&e| &self.events[e].id)
            .collect())
    }

    /// w(o) = 1 / (|g(o)| + 1)
    pub fn object_weight(&self, o: &str) -> Result<f64, ModelError> {
        let pos = self.require_object(o)?;
        Ok(weight_for(self.object_events[pos].len()))
    }

    /// The k-th (1-based) event of g(o).
    pub fn kth_event(&self, o: &str, k: usize) -> Result<&EventId, ModelError> {
        let pos = self.require_object(o)?;
        let related = &self.object_events[pos];
        if k == 0 || k > related.len() {
            return Err(ModelError::OutOfRange {
                object: o.to_string(),
                k,
                len: related.len(),
            });
        }
        Ok(&self.events[related[k - 1]].id)
    }

    /// Sub-log keeping the events whose positions are flagged in `keep`.
    /// Pairs touching dropped events go, and so do objects left without
    /// events.
    pub fn restrict_events(&self, keep: &[bool]) -> DbEventLog {
        assert_eq!(keep.len(), self.events.len());
        let pairs: Vec<(usize, usize)> = self.eo.iter().copied().filter(|&(e, _)| keep[e]).collect();
        let mut keep_object = vec![false; self.objects.len()];
        for &(_, o) in &pairs {
            keep_object[o] = true;
        }

        let mut event_map = vec![usize::MAX; self.events.len()];
        let mut events = Vec::new();
        for (pos, e) in self.events.iter().enumerate() {
            if keep[pos] {
                event_map[pos] = events.len();
                events.push(e.clone());
            }
        }
        let mut object_map = vec![usize::MAX; self.objects.len()];
        let mut objects = Vec::new();
        for (pos, o) in self.objects.iter().enumerate() {
            if keep_object[pos] {
                object_map[pos] = objects.len();
                objects.push(o.clone());
            }
        }
        let event_index = events
            .iter()
            .enumerate()
            .map(|(p, e)| (e.id.clone(), p))
            .collect();
        let object_index = objects
            .iter()
            .enumerate()
            .map(|(p, o)| (o.id.clone(), p))
            .collect();
        let pairs = pairs
            .into_iter()
            .map(|(e, o)| (event_map[e], object_map[o]))
            .collect();
        Self::from_positions(events, objects, event_index, object_index, pairs)
    }
}

pub(crate) fn weight_for(related: usize) -> f64 {
    1.0 / (related as f64 + 1.0)
}

/// A group of events under one case identifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub id: CaseId,
    /// Distinct event ids in the total order of the originating log.
    events: Vec<EventId>,
    pub source_object: Option<ObjectId>,
}

impl Case {
    /// `events` must be non-empty; duplicates are dropped, first occurrence
    /// wins.
    pub fn new(
        id: CaseId,
        events: Vec<EventId>,
        source_object: Option<ObjectId>,
    ) -> Result<Self, ModelError> {
        if events.is_empty() {
            return Err(ModelError::EmptyCase(id));
        }
        let mut seen = std::collections::HashSet::with_capacity(events.len());
        let events = events.into_iter().filter(|e| seen.insert(e.clone())).collect();
        Ok(Self {
            id,
            events,
            source_object,
        })
    }

    pub fn events(&self) -> &[EventId] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub(crate) fn sort_events_by(&mut self, log: &DbEventLog) {
        self.events
            .sort_by_key(|e| log.event_position(e.as_str()).unwrap_or(usize::MAX));
    }
}

/// A case-grouped event log. One event may sit in several cases.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassicEventLog {
    cases: Vec<Case>,
    events: Vec<Event>,
    event_index: HashMap<EventId, usize>,
}

impl ClassicEventLog {
    /// `events` must already be in the total order and every case event
    /// must be among them.
    pub(crate) fn from_parts(cases: Vec<Case>, events: Vec<Event>) -> Self {
        let event_index = events
            .iter()
            .enumerate()
            .map(|(p, e)| (e.id.clone(), p))
            .collect();
        Self {
            cases,
            events,
            event_index,
        }
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event(&self, id: &str) -> Option<&Event> {
        self.event_index.get(id).map(|&p| &self.events[p])
    }

    /// Each case's events resolved, in the total order.
    pub fn traces(&self) -> impl Iterator<Item = (&Case, Vec<&Event>)> + '_ {
        self.cases.iter().map(move |c| {
            let mut trace: Vec<&Event> = c.events().iter().filter_map(|e| self.event(e.as_str())).collect();
            trace.sort_by(|a, b| compare_events(a, b));
            (c, trace)
        })
    }

    pub fn mean_case_size(&self) -> f64 {
        if self.cases.is_empty() {
            return 0.0;
        }
        self.cases.iter().map(Case::len).sum::<usize>() as f64 / self.cases.len() as f64
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn ev(id: &str, act: &str, t: i64) -> Event {
        Event::new(EventId::new(id).unwrap(), Activity::new(act).unwrap(), t)
    }

    pub fn obj(id: &str, class: &str) -> ObjectEntry {
        ObjectEntry {
            id: ObjectId::new(id).unwrap(),
            class: ObjectClass::new(class).unwrap(),
        }
    }

    pub fn pair(e: &str, o: &str) -> (EventId, ObjectId) {
        (EventId::new(e).unwrap(), ObjectId::new(o).unwrap())
    }

    pub fn l1() -> DbEventLog {
        DbEventLog::new(
            vec![ev("e1", "A", 100), ev("e2", "B", 200), ev("e3", "C", 300), ev("e4", "B", 400)],
            vec![obj("o1", "order"), obj("o2", "item")],
            [("e1", "o1"), ("e2", "o1"), ("e3", "o1"), ("e2", "o2"), ("e4", "o2")]
                .iter()
                .map(|(e, o)| pair(e, o)),
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn ids(v: Vec<&EventId>) -> Vec<&str> {
        v.into_iter().map(EventId::as_str).collect()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare_events(&ev("e1", "A", 100), &ev("e2", "B", 200)), Ordering::Less);
        let e1 = ev("e1", "A", 100);
        assert_eq!(compare_events(&e1, &e1), Ordering::Equal);
        assert_eq!(compare_events(&ev("a", "X", 100), &ev("b", "Y", 100)), Ordering::Less);
    }

    #[test]
    fn related_events_l1() {
        let log = l1();
        assert_eq!(ids(log.related_events("o1").unwrap()), ["e1", "e2", "e3"]);
        assert_eq!(ids(log.related_events("o2").unwrap()), ["e2", "e4"]);
        assert!(matches!(log.related_events("nope"), Err(ModelError::NotFound(_))));
    }

    #[test]
    fn eventless_object_is_inert() {
        let log = DbEventLog::new(
            vec![ev("e1", "A", 1)],
            vec![obj("o3", "x")],
            std::iter::empty(),
        )
        .unwrap();
        assert!(log.related_events("o3").unwrap().is_empty());
        assert_eq!(log.object_weight("o3").unwrap(), 1.0);
    }

    #[test]
    fn weights_and_kth() {
        let log = l1();
        assert_eq!(log.object_weight("o1").unwrap(), 0.25);
        assert_eq!(log.object_weight("o2").unwrap(), 1.0 / 3.0);
        assert_eq!(log.kth_event("o1", 1).unwrap().as_str(), "e1");
        assert_eq!(log.kth_event("o1", 3).unwrap().as_str(), "e3");
        assert!(matches!(log.kth_event("o2", 3), Err(ModelError::OutOfRange { len: 2, .. })));
        assert!(matches!(log.kth_event("o2", 0), Err(ModelError::OutOfRange { .. })));
        assert!(matches!(log.kth_event("zz", 1), Err(ModelError::NotFound(_))));
    }

    #[test]
    fn construction_errors() {
        let dup = DbEventLog::new(vec![ev("e1", "A", 1), ev("e1", "B", 2)], vec![], std::iter::empty());
        assert!(matches!(dup, Err(ModelError::DuplicateEvent(_))));
        let dup = DbEventLog::new(vec![], vec![obj("o", "c"), obj("o", "d")], std::iter::empty());
        assert!(matches!(dup, Err(ModelError::DuplicateObject(_))));
        let dangling = DbEventLog::new(vec![ev("e1", "A", 1)], vec![], [pair("e1", "oX")]);
        assert!(matches!(dangling, Err(ModelError::DanglingObject(..))));
        assert!(EventId::new("").is_err());
    }

    #[test]
    fn restrict_drops_orphaned_objects() {
        let log = l1();
        let keep: Vec<bool> = log.events().iter().map(|e| e.id.as_str() != "e2" && e.id.as_str() != "e4").collect();
        let sub = log.restrict_events(&keep);
        assert_eq!(sub.events().len(), 2);
        assert_eq!(sub.objects().len(), 1);
        assert_eq!(ids(sub.related_events("o1").unwrap()), ["e1", "e3"]);
    }

    #[test]
    fn case_requires_events() {
        let id = CaseId::new("c:o1").unwrap();
        assert!(matches!(Case::new(id.clone(), vec![], None), Err(ModelError::EmptyCase(_))));
        let e = EventId::new("e1").unwrap();
        let case = Case::new(id, vec![e.clone(), e], None).unwrap();
        assert_eq!(case.len(), 1);
    }
}
