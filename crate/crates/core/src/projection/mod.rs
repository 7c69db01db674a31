//! From a database event log to a classic event log.
//!
//! A perspective (object class) is chosen. Each object o1 of that class with
//! at least one related event becomes one case. At window 0 the case holds
//! g(o1) together with g(o2) of every object o2 whose related events are
//! similar enough to those of o1:
//!
//! ```text
//! sim(X, Y) = |X ∩ Y| / max(|X|, |Y|)
//! case⁰(o1) = g(o1) ∪ ⋃ { g(o2) | sim(g(o1), g(o2)) ≥ ω }
//! ```
//!
//! Every further window level repeats the merge against the cases of the
//! previous level instead of the plain object event sets:
//!
//! ```text
//! caseⁱ(o1) = g(o1) ∪ ⋃ { s ∈ levelⁱ⁻¹ | sim(g(o1), s) ≥ ω }
//! ```
//!
//! With small ω and larger windows the cases grow quickly.

mod export;

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicBool, Ordering};

use serde::Serialize;

use crate::error::ProjectionError;
use crate::model::{Case, CaseId, ClassicEventLog, DbEventLog, ObjectClass};

pub use export::{format_timestamp, write_csv, write_xes};

pub const DEFAULT_OMEGA: f64 = 0.05;
pub const DEFAULT_WINDOW: usize = 2;

/// |a ∩ b| / max(|a|, |b|). Undefined when both sets are empty.
pub fn sim<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Result<f64, ProjectionError> {
    let denom = a.len().max(b.len());
    if denom == 0 {
        return Err(ProjectionError::Undefined);
    }
    Ok(a.intersection(b).count() as f64 / denom as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionParams {
    pub perspective: ObjectClass,
    /// Connection weight threshold, in (0, 1].
    pub omega: f64,
    /// Log window: number of refinement rounds after the first merge.
    pub window: usize,
}

impl ProjectionParams {
    pub fn new(perspective: ObjectClass, omega: f64, window: usize) -> Result<Self, ProjectionError> {
        let params = Self {
            perspective,
            omega,
            window,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ProjectionError> {
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(ProjectionError::InvalidParams(format!(
                "omega must lie in (0, 1], got {}",
                self.omega
            )));
        }
        Ok(())
    }
}

/// Cases for the chosen perspective, one per eventful object of the class,
/// ordered by object id.
pub fn case_notion(log: &DbEventLog, params: &ProjectionParams) -> Result<Vec<Case>, ProjectionError> {
    case_notion_cancellable(log, params, &AtomicBool::new(false))
}

/// Like [`case_notion`], giving up with [`ProjectionError::Cancelled`] once
/// `cancel` is set.
pub fn case_notion_cancellable(
    log: &DbEventLog,
    params: &ProjectionParams,
    cancel: &AtomicBool,
) -> Result<Vec<Case>, ProjectionError> {
    params.validate()?;
    let sources: Vec<usize> = log
        .objects()
        .iter()
        .enumerate()
        .filter(|(pos, o)| o.class == params.perspective && !log.object_event_positions(*pos).is_empty())
        .map(|(pos, _)| pos)
        .collect();
    if sources.is_empty() {
        return Err(ProjectionError::EmptyPerspective(params.perspective.to_string()));
    }

    let check = || {
        if cancel.load(Ordering::Relaxed) {
            Err(ProjectionError::Cancelled)
        } else {
            Ok(())
        }
    };

    let mut level = Vec::with_capacity(sources.len());
    for &o1 in &sources {
        check()?;
        level.push(first_level_case(log, o1, params.omega));
    }
    for _ in 0..params.window {
        level = next_level(log, &sources, &level, params.omega, &check)?;
    }

    let events = log.events();
    sources
        .iter()
        .zip(level)
        .map(|(&o1, positions)| {
            let object = &log.objects()[o1];
            let id = CaseId::new(format!("c:{}", object.id)).expect("non-empty");
            let ids = positions.into_iter().map(|p| events[p].id.clone()).collect();
            Case::new(id, ids, Some(object.id.clone())).map_err(|e| ProjectionError::InvalidParams(e.to_string()))
        })
        .collect()
}

fn passes(intersection: usize, a: usize, b: usize, omega: f64) -> bool {
    intersection as f64 / a.max(b) as f64 >= omega
}

/// g(o1) merged with g(o2) for every sufficiently similar o2. Only objects
/// sharing an event with o1 can reach a positive similarity.
fn first_level_case(log: &DbEventLog, o1: usize, omega: f64) -> Vec<usize> {
    let g1 = log.object_event_positions(o1);
    let mut shared: HashMap<usize, usize> = HashMap::new();
    for &e in g1 {
        for &o2 in log.event_object_positions(e) {
            *shared.entry(o2).or_default() += 1;
        }
    }
    let mut case: BTreeSet<usize> = g1.iter().copied().collect();
    for (o2, inter) in shared {
        let g2 = log.object_event_positions(o2);
        if passes(inter, g1.len(), g2.len(), omega) {
            case.extend(g2.iter().copied());
        }
    }
    case.into_iter().collect()
}

fn next_level(
    log: &DbEventLog,
    sources: &[usize],
    previous: &[Vec<usize>],
    omega: f64,
    check: &dyn Fn() -> Result<(), ProjectionError>,
) -> Result<Vec<Vec<usize>>, ProjectionError> {
    let mut holders: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, set) in previous.iter().enumerate() {
        for &e in set {
            holders.entry(e).or_default().push(i);
        }
    }
    let mut out = Vec::with_capacity(sources.len());
    for &o1 in sources {
        check()?;
        let g1 = log.object_event_positions(o1);
        let mut shared: HashMap<usize, usize> = HashMap::new();
        for e in g1 {
            for &i in holders.get(e).map(Vec::as_slice).unwrap_or(&[]) {
                *shared.entry(i).or_default() += 1;
            }
        }
        let mut case: BTreeSet<usize> = g1.iter().copied().collect();
        for (i, inter) in shared {
            if passes(inter, g1.len(), previous[i].len(), omega) {
                case.extend(previous[i].iter().copied());
            }
        }
        out.push(case.into_iter().collect());
    }
    Ok(out)
}

/// Builds the classic log holding `cases`, with events, activities,
/// attributes and order inherited from `log`.
pub fn project(log: &DbEventLog, cases: Vec<Case>) -> Result<ClassicEventLog, ProjectionError> {
    let mut used = vec![false; log.events().len()];
    let mut cases = cases;
    for case in &mut cases {
        for e in case.events() {
            let pos = log.event_position(e.as_str()).ok_or_else(|| ProjectionError::DanglingRef {
                case: case.id.to_string(),
                event: e.to_string(),
            })?;
            used[pos] = true;
        }
        case.sort_events_by(log);
    }
    let events = log
        .events()
        .iter()
        .zip(&used)
        .filter(|(_, &u)| u)
        .map(|(e, _)| e.clone())
        .collect();
    Ok(ClassicEventLog::from_parts(cases, events))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProjectionSummary {
    pub cases: usize,
    pub events: usize,
    pub mean_case_size: f64,
}

impl ProjectionSummary {
    pub fn of(clog: &ClassicEventLog) -> Self {
        Self {
            cases: clog.cases().len(),
            events: clog.events().len(),
            mean_case_size: clog.mean_case_size(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{self, ev, obj, pair};
    use crate::model::EventId;

    fn set(ids: &[&str]) -> BTreeSet<&'static str> {
        ids.iter().map(|s| -> &'static str { Box::leak(s.to_string().into_boxed_str()) }).collect()
    }

    fn params(class: &str, omega: f64, window: usize) -> ProjectionParams {
        ProjectionParams::new(ObjectClass::new(class).unwrap(), omega, window).unwrap()
    }

    fn ids(case: &Case) -> Vec<&str> {
        case.events().iter().map(EventId::as_str).collect()
    }

    #[test]
    fn sim_examples() {
        assert_eq!(sim(&set(&["e1", "e2", "e3"]), &set(&["e2", "e4"])).unwrap(), 1.0 / 3.0);
        assert_eq!(sim(&set(&["e1", "e2"]), &set(&["e1", "e2"])).unwrap(), 1.0);
        assert_eq!(sim(&set(&["e1"]), &set(&["e2"])).unwrap(), 0.0);
        assert_eq!(sim(&set(&["e1"]), &set(&[])).unwrap(), 0.0);
        assert_eq!(sim::<&str>(&set(&[]), &set(&[])), Err(ProjectionError::Undefined));
    }

    #[test]
    fn l1_case_notions() {
        let log = fixtures::l1();
        let cases = case_notion(&log, &params("order", 0.2, 0)).unwrap();
        assert_eq!(cases.len(), 1);
        assert_eq!(ids(&cases[0]), ["e1", "e2", "e3", "e4"]);
        assert_eq!(cases[0].id.as_str(), "c:o1");
        assert_eq!(cases[0].source_object.as_ref().unwrap().as_str(), "o1");

        let cases = case_notion(&log, &params("order", 1.0, 0)).unwrap();
        assert_eq!(ids(&cases[0]), ["e1", "e2", "e3"]);

        let cases = case_notion(&log, &params("item", 0.5, 0)).unwrap();
        assert_eq!(ids(&cases[0]), ["e2", "e4"]);
    }

    #[test]
    fn empty_perspective() {
        let log = DbEventLog::new(vec![ev("e1", "A", 1)], vec![obj("o1", "lonely")], std::iter::empty()).unwrap();
        assert!(matches!(
            case_notion(&log, &params("lonely", 0.5, 0)),
            Err(ProjectionError::EmptyPerspective(_))
        ));
        assert!(matches!(
            case_notion(&fixtures::l1(), &params("ghost", 0.5, 0)),
            Err(ProjectionError::EmptyPerspective(_))
        ));
    }

    #[test]
    fn bad_omega() {
        let class = ObjectClass::new("order").unwrap();
        assert!(ProjectionParams::new(class.clone(), 0.0, 0).is_err());
        assert!(ProjectionParams::new(class.clone(), 1.01, 0).is_err());
        assert!(ProjectionParams::new(class, f64::NAN, 0).is_err());
    }

    #[test]
    fn cancellation() {
        let flag = AtomicBool::new(true);
        assert_eq!(
            case_notion_cancellable(&fixtures::l1(), &params("order", 0.2, 3), &flag),
            Err(ProjectionError::Cancelled)
        );
    }

    #[test]
    fn windows_widen_cases() {
        // Chain o1 - o2 - o3 through shared events, o1 and o3 in class "p".
        let log = DbEventLog::new(
            vec![ev("a", "A", 1), ev("b", "B", 2), ev("c", "C", 3), ev("d", "D", 4)],
            vec![obj("o1", "p"), obj("o2", "q"), obj("o3", "p")],
            [pair("a", "o1"), pair("b", "o1"), pair("b", "o2"), pair("c", "o2"), pair("c", "o3"), pair("d", "o3")],
        )
        .unwrap();
        let w0 = case_notion(&log, &params("p", 0.5, 0)).unwrap();
        assert_eq!(ids(&w0[0]), ["a", "b", "c"]);
        assert_eq!(ids(&w0[1]), ["b", "c", "d"]);
        // Level 1: sim(g(o1) = {a,b}, {b,c,d}) = 1/3 < 0.5, so nothing new.
        let w1 = case_notion(&log, &params("p", 0.5, 1)).unwrap();
        assert_eq!(ids(&w1[0]), ["a", "b", "c"]);
        let w1 = case_notion(&log, &params("p", 0.3, 1)).unwrap();
        assert_eq!(ids(&w1[0]), ["a", "b", "c", "d"]);
    }

    #[test]
    fn projection() {
        let log = fixtures::l1();
        let cases = case_notion(&log, &params("order", 0.2, 0)).unwrap();
        let clog = project(&log, cases).unwrap();
        assert_eq!(clog.cases().len(), 1);
        let (_, trace) = clog.traces().next().unwrap();
        let acts: Vec<&str> = trace.iter().map(|e| e.activity.as_str()).collect();
        assert_eq!(acts, ["A", "B", "C", "B"]);
        assert_eq!(ProjectionSummary::of(&clog).mean_case_size, 4.0);

        assert!(project(&log, vec![]).unwrap().cases().is_empty());

        let ghost = Case::new(CaseId::new("x").unwrap(), vec![EventId::new("zz").unwrap()], None).unwrap();
        assert!(matches!(project(&log, vec![ghost]), Err(ProjectionError::DanglingRef { .. })));
    }

    #[test]
    fn convergent_events_appear_in_each_trace() {
        let log = fixtures::l1();
        let mk = |id: &str, evs: &[&str]| {
            Case::new(
                CaseId::new(id).unwrap(),
                evs.iter().map(|e| EventId::new(*e).unwrap()).collect(),
                None,
            )
            .unwrap()
        };
        let clog = project(&log, vec![mk("x", &["e2", "e1"]), mk("y", &["e4", "e2"])]).unwrap();
        assert_eq!(clog.events().len(), 3);
        let traces: Vec<Vec<&str>> = clog
            .traces()
            .map(|(_, t)| t.iter().map(|e| e.id.as_str()).collect())
            .collect();
        assert_eq!(traces, [vec!["e1", "e2"], vec!["e2", "e4"]]);
    }
}
