use std::collections::BTreeMap;

use crate::model::{DbEventLog, EventId, ObjectId};

/// Bipartite event-object adjacency. Every event and object of the source
/// log is a node, related or not.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct E2OGraph {
    event_objects: BTreeMap<EventId, Vec<ObjectId>>,
    object_events: BTreeMap<ObjectId, Vec<EventId>>,
    edges: usize,
}

impl E2OGraph {
    /// Objects related to `e`, ascending by id.
    pub fn objects_of(&self, e: &str) -> Option<&[ObjectId]> {
        self.event_objects.get(e).map(Vec::as_slice)
    }

    /// Events related to `o`, in the total event order.
    pub fn events_of(&self, o: &str) -> Option<&[EventId]> {
        self.object_events.get(o).map(Vec::as_slice)
    }

    pub fn event_count(&self) -> usize {
        self.event_objects.len()
    }

    pub fn object_count(&self) -> usize {
        self.object_events.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn edges(&self) -> impl Iterator<Item = (&EventId, &ObjectId)> + '_ {
        self.event_objects
            .iter()
            .flat_map(|(e, objs)| objs.iter().map(move |o| (e, o)))
    }
}

pub fn build_e2o(log: &DbEventLog) -> E2OGraph {
    let objects = log.objects();
    let event_objects = log
        .events()
        .iter()
        .enumerate()
        .map(|(pos, e)| {
            let related = log
                .event_object_positions(pos)
                .iter()
                .map(|&o| objects[o].id.clone())
                .collect();
            (e.id.clone(), related)
        })
        .collect();
    let object_events = objects
        .iter()
        .enumerate()
        .map(|(pos, o)| {
            let related = log
                .object_event_positions(pos)
                .iter()
                .map(|&e| log.events()[e].id.clone())
                .collect();
            (o.id.clone(), related)
        })
        .collect();
    E2OGraph {
        event_objects,
        object_events,
        edges: log.eo_len(),
    }
}
