use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use serde::Serialize;

use super::ModelSnapshot;
use crate::error::ModelError;
use crate::model::{weight_for, DbEventLog, EventId, ObjectId};

/// One directly-follows step of a single object: from its (index-1)-th to
/// its index-th related event.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct E2EEdge {
    pub obj: ObjectId,
    /// 1-based position of `out_event` in the object's event list, so ≥ 2.
    pub index: usize,
    pub in_event: EventId,
    pub out_event: EventId,
    pub weight: f64,
    pub perf: f64,
}

/// Positions into the log an E2E multigraph was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Endpoints {
    pub object: usize,
    pub input: usize,
    pub output: usize,
}

#[derive(Debug, Default)]
pub struct E2EMultigraph {
    edges: Vec<E2EEdge>,
    endpoints: Vec<Endpoints>,
    by_pair: OnceLock<HashMap<(EventId, EventId), Vec<usize>>>,
    by_event: OnceLock<HashMap<EventId, Vec<usize>>>,
}

impl Clone for E2EMultigraph {
    fn clone(&self) -> Self {
        Self {
            edges: self.edges.clone(),
            endpoints: self.endpoints.clone(),
            by_pair: OnceLock::new(),
            by_event: OnceLock::new(),
        }
    }
}

impl PartialEq for E2EMultigraph {
    fn eq(&self, other: &Self) -> bool {
        self.edges == other.edges
    }
}

impl E2EMultigraph {
    pub fn edges(&self) -> &[E2EEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub(crate) fn endpoints(&self) -> &[Endpoints] {
        &self.endpoints
    }

    /// R_E(e1, e2): every edge going from `e1` to `e2`.
    pub fn between(&self, e1: &str, e2: &str) -> Vec<&E2EEdge> {
        let index = self.by_pair.get_or_init(|| {
            let mut map: HashMap<(EventId, EventId), Vec<usize>> = HashMap::new();
            for (i, edge) in self.edges.iter().enumerate() {
                map.entry((edge.in_event.clone(), edge.out_event.clone()))
                    .or_default()
                    .push(i);
            }
            map
        });
        // HashMap lookups on a tuple key need owned ids.
        let (Ok(a), Ok(b)) = (EventId::new(e1), EventId::new(e2)) else {
            return Vec::new();
        };
        index
            .get(&(a, b))
            .map(|ix| ix.iter().map(|&i| &self.edges[i]).collect())
            .unwrap_or_default()
    }

    /// Indices of edges entering or leaving `e`.
    fn incident(&self, e: &str) -> &[usize] {
        let index = self.by_event.get_or_init(|| {
            let mut map: HashMap<EventId, Vec<usize>> = HashMap::new();
            for (i, edge) in self.edges.iter().enumerate() {
                map.entry(edge.in_event.clone()).or_default().push(i);
                if edge.out_event != edge.in_event {
                    map.entry(edge.out_event.clone()).or_default().push(i);
                }
            }
            map
        });
        index.get(e).map(Vec::as_slice).unwrap_or(&[])
    }

    fn subgraph(&self, mut picked: Vec<usize>) -> Self {
        picked.sort_unstable();
        Self {
            edges: picked.iter().map(|&i| self.edges[i].clone()).collect(),
            endpoints: picked.iter().map(|&i| self.endpoints[i]).collect(),
            by_pair: OnceLock::new(),
            by_event: OnceLock::new(),
        }
    }
}

/// One edge per object o and index i with 2 ≤ i ≤ |g(o)|. Linear in the
/// number of event-object pairs: the per-object event lists are already in
/// the total order.
pub fn build_e2e(log: &DbEventLog) -> E2EMultigraph {
    let events = log.events();
    let mut edges = Vec::with_capacity(log.eo_len());
    let mut endpoints = Vec::with_capacity(log.eo_len());
    for (opos, object) in log.objects().iter().enumerate() {
        let related = log.object_event_positions(opos);
        let weight = weight_for(related.len());
        for (step, pair) in related.windows(2).enumerate() {
            let (input, output) = (pair[0], pair[1]);
            edges.push(E2EEdge {
                obj: object.id.clone(),
                index: step + 2,
                in_event: events[input].id.clone(),
                out_event: events[output].id.clone(),
                weight,
                perf: (events[output].timestamp - events[input].timestamp) as f64,
            });
            endpoints.push(Endpoints {
                object: opos,
                input,
                output,
            });
        }
    }
    E2EMultigraph {
        edges,
        endpoints,
        by_pair: OnceLock::new(),
        by_event: OnceLock::new(),
    }
}

/// Edges reachable from `e` within `radius` hops, ignoring direction.
/// Radius 1 yields exactly the edges touching `e`.
pub fn e2e_neighborhood(snapshot: &ModelSnapshot, e: &str, radius: usize) -> Result<E2EMultigraph, ModelError> {
    if snapshot.log().event(e).is_none() {
        return Err(ModelError::NotFound(format!("event {e}")));
    }
    let graph = snapshot.e2e();
    let mut visited: HashSet<&str> = HashSet::from([e]);
    let mut frontier = vec![e];
    let mut picked = HashSet::new();
    for _ in 0..radius {
        let mut next = Vec::new();
        for event in frontier {
            for &i in graph.incident(event) {
                picked.insert(i);
                let edge = &graph.edges[i];
                for end in [edge.in_event.as_str(), edge.out_event.as_str()] {
                    if visited.insert(end) {
                        next.push(end);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(graph.subgraph(picked.into_iter().collect()))
}
