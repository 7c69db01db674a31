use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{E2EMultigraph, EdgeKey};
use crate::model::{Activity, DbEventLog, ObjectClass};

/// Aggregation of the E2E edges of one object class between two
/// activities.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct A2AEdge {
    pub class: ObjectClass,
    pub source: Activity,
    pub target: Activity,
    pub count: u64,
    /// Sum of the contributing E2E weights.
    pub weight: f64,
    /// `weight` over the largest weight among edges of the same class.
    pub weight_norm: f64,
    /// Mean performance of the contributing E2E edges.
    pub perf: f64,
    /// Indices of the contributing edges in the E2E multigraph.
    #[serde(skip)]
    pub contributing: Vec<usize>,
}

impl A2AEdge {
    pub fn key(&self) -> EdgeKey {
        EdgeKey {
            class: self.class.clone(),
            source: self.source.clone(),
            target: self.target.clone(),
        }
    }
}

/// Activities with their occurrence counts, and every (class, source,
/// target) edge with a count of at least one, sorted by that triple.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct A2AMultigraph {
    pub(crate) nodes: BTreeMap<Activity, u64>,
    pub(crate) edges: Vec<A2AEdge>,
}

impl A2AMultigraph {
    pub fn nodes(&self) -> &BTreeMap<Activity, u64> {
        &self.nodes
    }

    pub fn edges(&self) -> &[A2AEdge] {
        &self.edges
    }

    pub fn edge(&self, key: &EdgeKey) -> Option<&A2AEdge> {
        self.edges
            .binary_search_by(|e| {
                (&e.class, &e.source, &e.target).cmp(&(&key.class, &key.source, &key.target))
            })
            .ok()
            .map(|i| &self.edges[i])
    }

    /// R_A(a1, a2): one edge per class linking the two activities.
    pub fn between<'a>(&'a self, a1: &'a str, a2: &'a str) -> impl Iterator<Item = &'a A2AEdge> + 'a {
        self.edges
            .iter()
            .filter(move |e| e.source.as_str() == a1 && e.target.as_str() == a2)
    }

    pub fn classes(&self) -> Vec<&ObjectClass> {
        let mut out: Vec<&ObjectClass> = self.edges.iter().map(|e| &e.class).collect();
        out.dedup();
        out
    }
}

#[derive(Default)]
struct Acc {
    count: u64,
    weight: f64,
    perf_sum: i128,
    contributing: Vec<usize>,
}

/// Groups E2E edges by (class of the object, activity of the input event,
/// activity of the output event). `e2e` must come from `log`.
pub fn build_a2a(log: &DbEventLog, e2e: &E2EMultigraph) -> A2AMultigraph {
    let events = log.events();
    let objects = log.objects();

    let mut nodes: BTreeMap<Activity, u64> = BTreeMap::new();
    let mut counts: HashMap<&Activity, u64> = HashMap::new();
    for e in events {
        *counts.entry(&e.activity).or_default() += 1;
    }
    nodes.extend(counts.into_iter().map(|(a, n)| (a.clone(), n)));

    let mut groups: HashMap<(&ObjectClass, &Activity, &Activity), Acc> = HashMap::new();
    for (i, (edge, ends)) in e2e.edges().iter().zip(e2e.endpoints()).enumerate() {
        let input = &events[ends.input];
        let output = &events[ends.output];
        debug_assert_eq!(input.id, edge.in_event);
        let key = (&objects[ends.object].class, &input.activity, &output.activity);
        let acc = groups.entry(key).or_default();
        acc.count += 1;
        acc.weight += edge.weight;
        acc.perf_sum += i128::from(output.timestamp) - i128::from(input.timestamp);
        acc.contributing.push(i);
    }

    let mut edges: Vec<A2AEdge> = groups
        .into_iter()
        .map(|((class, source, target), acc)| A2AEdge {
            class: class.clone(),
            source: source.clone(),
            target: target.clone(),
            count: acc.count,
            weight: acc.weight,
            weight_norm: 0.0,
            perf: acc.perf_sum as f64 / acc.count as f64,
            contributing: acc.contributing,
        })
        .collect();
    edges.sort_by(|a, b| (&a.class, &a.source, &a.target).cmp(&(&b.class, &b.source, &b.target)));

    let mut max_by_class: HashMap<ObjectClass, f64> = HashMap::new();
    for e in &edges {
        let max = max_by_class.entry(e.class.clone()).or_insert(0.0);
        *max = max.max(e.weight);
    }
    for e in &mut edges {
        e.weight_norm = e.weight / max_by_class[&e.class];
    }

    A2AMultigraph { nodes, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::build_e2e;
    use crate::model::fixtures::{self, ev, obj, pair};

    fn key(c: &str, s: &str, t: &str) -> EdgeKey {
        EdgeKey {
            class: ObjectClass::new(c).unwrap(),
            source: Activity::new(s).unwrap(),
            target: Activity::new(t).unwrap(),
        }
    }

    #[test]
    fn l1_edges_and_nodes() {
        let log = fixtures::l1();
        let a2a = build_a2a(&log, &build_e2e(&log));
        let rows: Vec<(String, String, String, u64, f64, f64, f64)> = a2a
            .edges()
            .iter()
            .map(|e| {
                (e.class.to_string(), e.source.to_string(), e.target.to_string(), e.count, e.weight, e.weight_norm, e.perf)
            })
            .collect();
        let s = |x: &str| x.to_string();
        assert_eq!(
            rows,
            vec![
                (s("item"), s("B"), s("B"), 1, 1.0 / 3.0, 1.0, 200.0),
                (s("order"), s("A"), s("B"), 1, 0.25, 1.0, 100.0),
                (s("order"), s("B"), s("C"), 1, 0.25, 1.0, 100.0),
            ]
        );
        let nodes: Vec<(&str, u64)> = a2a.nodes().iter().map(|(a, n)| (a.as_str(), *n)).collect();
        assert_eq!(nodes, [("A", 1), ("B", 2), ("C", 1)]);
        assert_eq!(a2a.edge(&key("item", "B", "B")).unwrap().count, 1);
        assert!(a2a.edge(&key("item", "A", "B")).is_none());
        assert_eq!(a2a.between("B", "B").count(), 1);
        assert_eq!(a2a.classes().len(), 2);
    }

    #[test]
    fn nodes_without_edges() {
        let log = DbEventLog::new(
            vec![ev("e1", "A", 1), ev("e2", "A", 2)],
            vec![obj("o1", "c"), obj("o2", "c")],
            [pair("e1", "o1"), pair("e2", "o2")],
        )
        .unwrap();
        let a2a = build_a2a(&log, &build_e2e(&log));
        assert!(a2a.edges().is_empty());
        assert_eq!(a2a.nodes().len(), 1);
        assert_eq!(a2a.nodes().values().next(), Some(&2));
    }

    #[test]
    fn normalization_is_per_class() {
        // o1: A,B,A (w=1/4 per edge); o2: A,B (w=1/3).
        let log = DbEventLog::new(
            vec![ev("e1", "A", 1), ev("e2", "B", 2), ev("e3", "A", 4), ev("e4", "A", 5), ev("e5", "B", 9)],
            vec![obj("o1", "c"), obj("o2", "c")],
            [pair("e1", "o1"), pair("e2", "o1"), pair("e3", "o1"), pair("e4", "o2"), pair("e5", "o2")],
        )
        .unwrap();
        let a2a = build_a2a(&log, &build_e2e(&log));
        let ab = a2a.edge(&key("c", "A", "B")).unwrap();
        assert_eq!(ab.count, 2);
        assert!((ab.weight - (0.25 + 1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(ab.weight_norm, 1.0);
        assert_eq!(ab.perf, 2.5);
        let ba = a2a.edge(&key("c", "B", "A")).unwrap();
        assert!((ba.weight_norm - 0.25 / (0.25 + 1.0 / 3.0)).abs() < 1e-12);
    }
}
