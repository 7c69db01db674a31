//! Interactive filters over a [`ModelSnapshot`].
//!
//! View filters (activity count, path count, weight threshold) only trim
//! what is displayed and leave the snapshot alone. The edge drill-down
//! filter selects objects and recomputes the whole model from the events
//! they touch, yielding a new snapshot.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::FilterError;
use crate::graphs::{A2AMultigraph, EdgeKey, ModelSnapshot};

/// Weight threshold applied to the initial view of a freshly loaded model.
pub const DEFAULT_WEIGHT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum FilterSpec {
    MinActivityCount { n: u64 },
    MinPathCount { n: u64 },
    WeightThreshold { tau: f64 },
    EdgeDrill { edges: Vec<EdgeKey> },
}

impl FilterSpec {
    pub fn validate(&self) -> Result<(), FilterError> {
        match self {
            FilterSpec::WeightThreshold { tau } if !(0.0..=1.0).contains(tau) => {
                Err(FilterError::Invalid(format!("tau must lie in [0, 1], got {tau}")))
            }
            FilterSpec::EdgeDrill { edges } if edges.is_empty() => {
                Err(FilterError::Invalid("edge drill needs at least one edge".into()))
            }
            _ => Ok(()),
        }
    }
}

/// The three display sliders combined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ViewParams {
    pub min_activity_count: u64,
    pub min_path_count: u64,
    pub weight_threshold: f64,
}

impl Default for ViewParams {
    /// The initial view: no count limits, weight threshold 0.5.
    fn default() -> Self {
        Self {
            min_activity_count: 0,
            min_path_count: 0,
            weight_threshold: DEFAULT_WEIGHT_THRESHOLD,
        }
    }
}

impl ViewParams {
    /// Shows everything.
    pub fn identity() -> Self {
        Self {
            min_activity_count: 0,
            min_path_count: 0,
            weight_threshold: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        if !(0.0..=1.0).contains(&self.weight_threshold) {
            return Err(FilterError::Invalid(format!(
                "weight threshold must lie in [0, 1], got {}",
                self.weight_threshold
            )));
        }
        Ok(())
    }

    /// Nodes below the activity count go together with their edges; edges
    /// below the path count or normalized weight go on their own. Nodes
    /// that lose all their edges stay.
    pub fn apply(&self, graph: &A2AMultigraph) -> A2AMultigraph {
        let nodes: BTreeMap<_, _> = graph
            .nodes
            .iter()
            .filter(|(_, &count)| count >= self.min_activity_count)
            .map(|(a, &count)| (a.clone(), count))
            .collect();
        let edges = graph
            .edges
            .iter()
            .filter(|e| {
                e.count >= self.min_path_count
                    && e.weight_norm >= self.weight_threshold
                    && nodes.contains_key(&e.source)
                    && nodes.contains_key(&e.target)
            })
            .cloned()
            .collect();
        A2AMultigraph { nodes, edges }
    }
}

/// Applies one slider-style filter to the snapshot's A2A multigraph.
pub fn apply_view_filter(snapshot: &ModelSnapshot, spec: &FilterSpec) -> Result<A2AMultigraph, FilterError> {
    spec.validate()?;
    let params = match *spec {
        FilterSpec::MinActivityCount { n } => ViewParams {
            min_activity_count: n,
            ..ViewParams::identity()
        },
        FilterSpec::MinPathCount { n } => ViewParams {
            min_path_count: n,
            ..ViewParams::identity()
        },
        FilterSpec::WeightThreshold { tau } => ViewParams {
            weight_threshold: tau,
            ..ViewParams::identity()
        },
        FilterSpec::EdgeDrill { .. } => {
            return Err(FilterError::Invalid("edge drill is not a view filter".into()));
        }
    };
    Ok(params.apply(snapshot.a2a()))
}

/// Drill-down on selected A2A edges.
///
/// For every selected edge, the objects of its class related to at least
/// one event carrying its source activity are collected; the sets of all
/// edges are united. The model is then rebuilt from the events related to
/// at least one collected object.
pub fn edge_drill_filter(snapshot: &ModelSnapshot, selected: &[EdgeKey]) -> Result<ModelSnapshot, FilterError> {
    if selected.is_empty() {
        return Err(FilterError::Invalid("edge drill needs at least one edge".into()));
    }
    for key in selected {
        if snapshot.a2a().edge(key).is_none() {
            return Err(FilterError::NotFound(format!("edge {key}")));
        }
    }

    let log = snapshot.log();
    let wanted: HashSet<(&str, &str)> = selected
        .iter()
        .map(|k| (k.class.as_str(), k.source.as_str()))
        .collect();
    let mut in_set = vec![false; log.objects().len()];
    for (opos, object) in log.objects().iter().enumerate() {
        in_set[opos] = log
            .object_event_positions(opos)
            .iter()
            .any(|&e| wanted.contains(&(object.class.as_str(), log.events()[e].activity.as_str())));
    }
    let keep: Vec<bool> = (0..log.events().len())
        .map(|e| log.event_object_positions(e).iter().any(|&o| in_set[o]))
        .collect();
    Ok(ModelSnapshot::build(log.restrict_events(&keep)))
}

/// Named snapshots to return to during an exploration session.
#[derive(Debug, Clone, Default)]
pub struct CheckpointStore {
    entries: BTreeMap<String, Arc<ModelSnapshot>>,
}

impl CheckpointStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores `snapshot` under `name`, replacing any previous entry.
    pub fn save(&mut self, name: &str, snapshot: Arc<ModelSnapshot>) -> Result<(), FilterError> {
        if name.is_empty() {
            return Err(FilterError::Invalid("checkpoint name must not be empty".into()));
        }
        self.entries.insert(name.to_string(), snapshot);
        Ok(())
    }

    pub fn reset(&self, name: &str) -> Result<Arc<ModelSnapshot>, FilterError> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| FilterError::NotFound(format!("checkpoint {name}")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fixtures, Activity, ObjectClass};

    fn key(c: &str, s: &str, t: &str) -> EdgeKey {
        EdgeKey {
            class: ObjectClass::new(c).unwrap(),
            source: Activity::new(s).unwrap(),
            target: Activity::new(t).unwrap(),
        }
    }

    fn l1() -> ModelSnapshot {
        ModelSnapshot::build(fixtures::l1())
    }

    fn event_ids(s: &ModelSnapshot) -> Vec<&str> {
        s.log().events().iter().map(|e| e.id.as_str()).collect()
    }

    #[test]
    fn path_count_keeps_nodes() {
        let view = apply_view_filter(&l1(), &FilterSpec::MinPathCount { n: 2 }).unwrap();
        assert!(view.edges().is_empty());
        assert_eq!(view.nodes().len(), 3);
    }

    #[test]
    fn zero_threshold_is_identity() {
        let snap = l1();
        let view = apply_view_filter(&snap, &FilterSpec::WeightThreshold { tau: 0.0 }).unwrap();
        assert_eq!(&view, snap.a2a());
        assert_eq!(ViewParams::default().apply(snap.a2a()), *snap.a2a());
    }

    #[test]
    fn activity_count_drops_nodes_and_edges() {
        let view = apply_view_filter(&l1(), &FilterSpec::MinActivityCount { n: 2 }).unwrap();
        let nodes: Vec<&str> = view.nodes().keys().map(|a| a.as_str()).collect();
        assert_eq!(nodes, ["B"]);
        // The item self-loop on B keeps both of its endpoints.
        assert_eq!(view.edges().len(), 1);
        assert_eq!(view.edges()[0].key(), key("item", "B", "B"));
    }

    #[test]
    fn invalid_specs() {
        let snap = l1();
        assert!(apply_view_filter(&snap, &FilterSpec::WeightThreshold { tau: 1.5 }).is_err());
        assert!(apply_view_filter(&snap, &FilterSpec::EdgeDrill { edges: vec![key("item", "B", "B")] }).is_err());
        assert!(matches!(edge_drill_filter(&snap, &[]), Err(FilterError::Invalid(_))));
        assert!(matches!(
            edge_drill_filter(&snap, &[key("item", "A", "B")]),
            Err(FilterError::NotFound(_))
        ));
    }

    #[test]
    fn drill_on_item_edge() {
        let out = edge_drill_filter(&l1(), &[key("item", "B", "B")]).unwrap();
        assert_eq!(event_ids(&out), ["e2", "e4"]);
        assert_eq!(out.a2a().edges().len(), 1);
        let e = &out.a2a().edges()[0];
        assert_eq!((e.key(), e.count), (key("item", "B", "B"), 1));
    }

    #[test]
    fn drill_on_order_edge() {
        let out = edge_drill_filter(&l1(), &[key("order", "A", "B")]).unwrap();
        assert_eq!(event_ids(&out), ["e1", "e2", "e3"]);
        let keys: Vec<EdgeKey> = out.a2a().edges().iter().map(|e| e.key()).collect();
        assert_eq!(keys, [key("order", "A", "B"), key("order", "B", "C")]);
    }

    #[test]
    fn drill_on_everything_is_identity() {
        let snap = l1();
        let all: Vec<EdgeKey> = snap.a2a().edges().iter().map(|e| e.key()).collect();
        let out = edge_drill_filter(&snap, &all).unwrap();
        assert_eq!(out, snap);
        assert_eq!(out.a2a(), snap.a2a());
    }

    #[test]
    fn spec_json() {
        let spec: FilterSpec = serde_json::from_str(r#"{"kind":"weightThreshold","tau":0.5}"#).unwrap();
        assert_eq!(spec, FilterSpec::WeightThreshold { tau: 0.5 });
        let spec: FilterSpec =
            serde_json::from_str(r#"{"kind":"edgeDrill","edges":[{"class":"item","source":"B","target":"B"}]}"#).unwrap();
        assert_eq!(spec, FilterSpec::EdgeDrill { edges: vec![key("item", "B", "B")] });
        assert_eq!(
            serde_json::to_string(&FilterSpec::MinPathCount { n: 2 }).unwrap(),
            r#"{"kind":"minPathCount","n":2}"#
        );
        assert!(serde_json::from_str::<FilterSpec>(r#"{"kind":"edgeDrill","edges":[{"class":""}]}"#).is_err());
    }

    #[test]
    fn checkpoints() {
        let s1 = Arc::new(l1());
        let s2 = Arc::new(edge_drill_filter(&s1, &[key("item", "B", "B")]).unwrap());
        let mut store = CheckpointStore::new();
        store.save("base", Arc::clone(&s1)).unwrap();
        assert!(Arc::ptr_eq(&store.reset("base").unwrap(), &s1));
        assert!(matches!(store.reset("missing"), Err(FilterError::NotFound(_))));
        store.save("base", Arc::clone(&s2)).unwrap();
        assert!(Arc::ptr_eq(&store.reset("base").unwrap(), &s2));
        assert!(store.save("", s1).is_err());
        assert_eq!(store.names().collect::<Vec<_>>(), ["base"]);
    }
}
