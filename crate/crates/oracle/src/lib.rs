//! Literal, brute-force evaluation of the StarStar definitions.
//!
//! Everything here works on plain strings and recomputes from scratch on
//! every call. Nothing is shared with `starstar-core`; tests convert an engine
//! log into a [`PlainLog`] and compare the two independently derived answers.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainEvent {
    pub id: String,
    pub activity: String,
    pub time: i64,
}

/// An event log in a database context, stored as bare tuples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlainLog {
    pub events: Vec<PlainEvent>,
    /// (object id, class)
    pub objects: Vec<(String, String)>,
    /// (event id, object id)
    pub eo: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleE2E {
    pub obj: String,
    pub index: usize,
    pub in_event: String,
    pub out_event: String,
    pub weight: f64,
    pub perf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleA2A {
    pub count: usize,
    pub weight: f64,
    pub perf: f64,
}

/// The four-event fixture used throughout the test-suite.
pub fn l1() -> PlainLog {
    let ev = |id: &str, act: &str, time: i64| PlainEvent {
        id: id.into(),
        activity: act.into(),
        time,
    };
    PlainLog {
        events: vec![
            ev("e1", "A", 100),
            ev("e2", "B", 200),
            ev("e3", "C", 300),
            ev("e4", "B", 400),
        ],
        objects: vec![("o1".into(), "order".into()), ("o2".into(), "item".into())],
        eo: [("e1", "o1"), ("e2", "o1"), ("e3", "o1"), ("e2", "o2"), ("e4", "o2")]
            .iter()
            .map(|(e, o)| (e.to_string(), o.to_string()))
            .collect(),
    }
}

impl PlainLog {
    fn event(&self, id: &str) -> &PlainEvent {
        self.events.iter().find(|e| e.id == id).expect("event exists")
    }

    pub fn time(&self, id: &str) -> i64 {
        self.event(id).time
    }

    pub fn act(&self, id: &str) -> &str {
        &self.event(id).activity
    }

    pub fn class(&self, o: &str) -> &str {
        &self.objects.iter().find(|(id, _)| id == o).expect("object exists").1
    }

    /// `a ≤ b` in the total order: timestamp, then event id.
    pub fn leq(&self, a: &str, b: &str) -> bool {
        (self.time(a), a) <= (self.time(b), b)
    }

    /// O = { o | (e, o) ∈ EO }
    pub fn referenced_objects(&self) -> BTreeSet<String> {
        self.eo.iter().map(|(_, o)| o.clone()).collect()
    }

    pub fn g(&self, o: &str) -> BTreeSet<String> {
        self.eo
            .iter()
            .filter(|(_, obj)| obj == o)
            .map(|(e, _)| e.clone())
            .collect()
    }

    pub fn w(&self, o: &str) -> f64 {
        1.0 / (self.g(o).len() as f64 + 1.0)
    }

    /// The e ∈ g(o) such that |{e' ∈ g(o) | e' ≤ e}| = k.
    pub fn kth(&self, o: &str, k: usize) -> Option<String> {
        let related = self.g(o);
        related
            .iter()
            .find(|e| related.iter().filter(|other| self.leq(other, e)).count() == k)
            .cloned()
    }

    /// g(o) listed through kth for k = 1..|g(o)|.
    pub fn g_ordered(&self, o: &str) -> Vec<String> {
        (1..=self.g(o).len()).map(|k| self.kth(o, k).unwrap()).collect()
    }

    /// F_E with every attribute evaluated.
    pub fn f_e(&self) -> Vec<OracleE2E> {
        let mut out = Vec::new();
        for o in self.referenced_objects() {
            let n = self.g(&o).len();
            for i in 2..=n {
                let in_event = self.kth(&o, i - 1).unwrap();
                let out_event = self.kth(&o, i).unwrap();
                let perf = (self.time(&out_event) - self.time(&in_event)) as f64;
                out.push(OracleE2E {
                    obj: o.clone(),
                    index: i,
                    in_event,
                    out_event,
                    weight: self.w(&o),
                    perf,
                });
            }
        }
        out
    }

    /// R_E(e1, e2)
    pub fn r_e(&self, e1: &str, e2: &str) -> Vec<OracleE2E> {
        self.f_e()
            .into_iter()
            .filter(|f| f.in_event == e1 && f.out_event == e2)
            .collect()
    }

    /// Every (class, a1, a2) triple over the classes and activities of the
    /// log, keeping only those whose AE set is non-empty.
    pub fn f_a(&self) -> BTreeMap<(String, String, String), OracleA2A> {
        let classes: BTreeSet<&str> = self.objects.iter().map(|(_, c)| c.as_str()).collect();
        let activities: BTreeSet<&str> = self.events.iter().map(|e| e.activity.as_str()).collect();
        let f_e = self.f_e();
        let mut out = BTreeMap::new();
        for c in &classes {
            for a1 in &activities {
                for a2 in &activities {
                    let ae: Vec<&OracleE2E> = f_e
                        .iter()
                        .filter(|f| {
                            self.class(&f.obj) == *c
                                && self.act(&f.in_event) == *a1
                                && self.act(&f.out_event) == *a2
                        })
                        .collect();
                    if ae.is_empty() {
                        continue;
                    }
                    let count = ae.len();
                    let weight = ae.iter().map(|f| f.weight).sum();
                    let perf = ae.iter().map(|f| f.perf).sum::<f64>() / count as f64;
                    out.insert(
                        (c.to_string(), a1.to_string(), a2.to_string()),
                        OracleA2A {
                            count,
                            weight,
                            perf,
                        },
                    );
                }
            }
        }
        out
    }

    /// Number of events per activity.
    pub fn activity_counts(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for e in &self.events {
            *out.entry(e.activity.clone()).or_insert(0) += 1;
        }
        out
    }

    /// C⁰ evaluated per source object o1 of class `c` with g(o1) ≠ ∅.
    pub fn c0(&self, c: &str, omega: f64) -> BTreeMap<String, BTreeSet<String>> {
        let objects = self.referenced_objects();
        let mut out = BTreeMap::new();
        for o1 in objects.iter().filter(|o| self.class(o) == c) {
            let g1 = self.g(o1);
            let mut case = g1.clone();
            for o2 in &objects {
                let g2 = self.g(o2);
                if sim(&g1, &g2) >= omega {
                    case.extend(g2);
                }
            }
            out.insert(o1.clone(), case);
        }
        out
    }

    /// Cⁱ: level i computed from the sets of level i - 1.
    pub fn ci(&self, c: &str, omega: f64, i: usize) -> BTreeMap<String, BTreeSet<String>> {
        let mut level = self.c0(c, omega);
        for _ in 0..i {
            let previous: Vec<BTreeSet<String>> = level.values().cloned().collect();
            let mut next = BTreeMap::new();
            for o1 in level.keys() {
                let g1 = self.g(o1);
                let mut case = g1.clone();
                for s in &previous {
                    if sim(&g1, s) >= omega {
                        case.extend(s.iter().cloned());
                    }
                }
                next.insert(o1.clone(), case);
            }
            level = next;
        }
        level
    }

    /// Traces keyed by object id, each ordered by the total order. Used to
    /// build a classic directly-follows graph with objects as cases.
    pub fn traces_by_object(&self) -> BTreeMap<String, Vec<String>> {
        self.referenced_objects()
            .into_iter()
            .map(|o| {
                let trace = self.g_ordered(&o).iter().map(|e| self.act(e).to_string()).collect();
                (o, trace)
            })
            .collect()
    }
}

pub fn sim(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let denom = a.len().max(b.len());
    if denom == 0 {
        return f64::NAN;
    }
    a.intersection(b).count() as f64 / denom as f64
}

/// Classic directly-follows counts over a set of activity traces.
pub fn classic_dfg<'a>(traces: impl IntoIterator<Item = &'a Vec<String>>) -> BTreeMap<(String, String), usize> {
    let mut out = BTreeMap::new();
    for trace in traces {
        for pair in trace.windows(2) {
            *out.entry((pair[0].clone(), pair[1].clone())).or_insert(0) += 1;
        }
    }
    out
}

/// Bounds for [`random_log`].
#[derive(Debug, Clone, Copy)]
pub struct RandomLogShape {
    pub max_events: usize,
    pub max_objects: usize,
    pub max_classes: usize,
    pub activities: usize,
    /// Timestamps are drawn from `0..time_span`; a small span forces ties.
    pub time_span: i64,
    /// When set, every event relates to exactly one object and all objects
    /// share a single class.
    pub single_object_per_event: bool,
}

impl Default for RandomLogShape {
    fn default() -> Self {
        Self {
            max_events: 30,
            max_objects: 10,
            max_classes: 3,
            activities: 5,
            time_span: 20,
            single_object_per_event: false,
        }
    }
}

pub fn random_log(seed: u64, shape: RandomLogShape) -> PlainLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_events = rng.random_range(0..=shape.max_events);
    let n_objects = rng.random_range(1..=shape.max_objects.max(1));
    let n_classes = if shape.single_object_per_event {
        1
    } else {
        rng.random_range(1..=shape.max_classes.max(1))
    };

    let events = (0..n_events)
        .map(|i| PlainEvent {
            id: format!("e{i}"),
            activity: format!("a{}", rng.random_range(0..shape.activities.max(1))),
            time: rng.random_range(0..shape.time_span.max(1)),
        })
        .collect::<Vec<_>>();
    let objects = (0..n_objects)
        .map(|i| (format!("o{i}"), format!("c{}", rng.random_range(0..n_classes))))
        .collect::<Vec<_>>();

    let mut eo = BTreeSet::new();
    for e in &events {
        if shape.single_object_per_event {
            let o = rng.random_range(0..n_objects);
            eo.insert((e.id.clone(), format!("o{o}")));
        } else {
            let k = rng.random_range(0..=3.min(n_objects));
            for _ in 0..k {
                let o = rng.random_range(0..n_objects);
                eo.insert((e.id.clone(), format!("o{o}")));
            }
        }
    }
    PlainLog {
        events,
        objects,
        eo: eo.into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_functions() {
        let log = l1();
        assert_eq!(log.g_ordered("o1"), ["e1", "e2", "e3"]);
        assert_eq!(log.g_ordered("o2"), ["e2", "e4"]);
        assert_eq!(log.w("o1"), 0.25);
        assert_eq!(log.w("o2"), 1.0 / 3.0);
        assert_eq!(log.kth("o2", 3), None);
        assert_eq!(log.f_e().len(), 3);
        assert_eq!(sim(&log.g("o1"), &log.g("o2")), 1.0 / 3.0);
    }

    #[test]
    fn l1_case_notions() {
        let log = l1();
        let case = &log.c0("order", 0.2)["o1"];
        assert_eq!(case.len(), 4);
        assert_eq!(log.c0("order", 1.0)["o1"], log.g("o1"));
        assert_eq!(log.c0("item", 0.5)["o2"], log.g("o2"));
    }
}
