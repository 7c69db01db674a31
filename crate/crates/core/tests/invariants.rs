mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::to_log;
use proptest::prelude::*;
use starstar_core::filter::{apply_view_filter, edge_drill_filter, FilterSpec, ViewParams};
use starstar_core::projection::{case_notion, project, ProjectionParams};
use starstar_core::{compare_events, EdgeKey, ModelSnapshot, ObjectClass};
use starstar_oracle::{classic_dfg, random_log, RandomLogShape};

fn snapshot(seed: u64) -> ModelSnapshot {
    ModelSnapshot::build(to_log(&random_log(seed, RandomLogShape::default())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// With one object per event and a single class, the A2A counts are the
    /// directly-follows counts of the traces obtained by taking objects as
    /// cases.
    #[test]
    fn single_object_logs_give_the_classic_dfg(seed in any::<u64>()) {
        let plain = random_log(seed, RandomLogShape { single_object_per_event: true, ..RandomLogShape::default() });
        let snap = ModelSnapshot::build(to_log(&plain));
        let got: BTreeMap<(String, String), usize> = snap
            .a2a()
            .edges()
            .iter()
            .map(|e| ((e.source.to_string(), e.target.to_string()), e.count as usize))
            .collect();
        prop_assert_eq!(got, classic_dfg(plain.traces_by_object().values()));
    }

    #[test]
    fn view_filters_are_monotone_and_idempotent(seed in any::<u64>(), n in 0u64..4, m in 0u64..4, tau in 0.0f64..=1.0) {
        let snap = snapshot(seed);
        let before = snap.a2a().clone();
        let edges = |g: &starstar_core::A2AMultigraph| g.edges().iter().map(|e| e.key()).collect::<BTreeSet<EdgeKey>>();
        for spec in [
            FilterSpec::MinActivityCount { n },
            FilterSpec::MinPathCount { n },
            FilterSpec::WeightThreshold { tau },
        ] {
            let view = apply_view_filter(&snap, &spec).unwrap();
            prop_assert!(edges(&view).is_subset(&edges(snap.a2a())));
            let nodes: BTreeSet<_> = view.nodes().keys().collect();
            prop_assert!(nodes.iter().all(|a| snap.a2a().nodes().contains_key(*a)));
        }
        let a = ViewParams { min_activity_count: n, min_path_count: m, weight_threshold: tau };
        let tighter = ViewParams { min_activity_count: n + 1, min_path_count: m + 1, weight_threshold: tau.max(0.5) };
        let once = a.apply(snap.a2a());
        prop_assert_eq!(&a.apply(&once), &once);
        prop_assert!(edges(&tighter.apply(snap.a2a())).is_subset(&edges(&once)));
        prop_assert_eq!(&ViewParams::identity().apply(snap.a2a()), snap.a2a());
        // The snapshot itself is untouched.
        prop_assert_eq!(snap.a2a(), &before);
    }

    #[test]
    fn drilling_on_every_edge_changes_nothing(seed in any::<u64>()) {
        let snap = snapshot(seed);
        let all: Vec<EdgeKey> = snap.a2a().edges().iter().map(|e| e.key()).collect();
        prop_assume!(!all.is_empty());
        let out = edge_drill_filter(&snap, &all).unwrap();
        // Objects without edges may drop out together with their events, so
        // compare the graphs rather than the logs.
        prop_assert_eq!(out.a2a().edges(), snap.a2a().edges());
        prop_assert_eq!(out.e2e(), snap.e2e());
    }

    #[test]
    fn a2a_sums_are_consistent(seed in any::<u64>()) {
        let snap = snapshot(seed);
        let log = snap.log();
        let e2e = snap.e2e().edges();
        prop_assert_eq!(
            e2e.len(),
            (0..log.objects().len()).map(|o| log.object_event_positions(o).len().saturating_sub(1)).sum::<usize>()
        );
        let mut per_class: BTreeMap<String, usize> = BTreeMap::new();
        for (pos, o) in log.objects().iter().enumerate() {
            *per_class.entry(o.class.to_string()).or_default() += log.object_event_positions(pos).len().saturating_sub(1);
        }
        per_class.retain(|_, n| *n > 0);
        let mut counted: BTreeMap<String, usize> = BTreeMap::new();
        for edge in snap.a2a().edges() {
            prop_assert_eq!(edge.contributing.len() as u64, edge.count);
            let weight: f64 = edge.contributing.iter().map(|&i| e2e[i].weight).sum();
            let perf: f64 = edge.contributing.iter().map(|&i| e2e[i].perf).sum();
            prop_assert!((edge.weight - weight).abs() <= 1e-9 * weight.max(1.0));
            prop_assert!((edge.perf * edge.count as f64 - perf).abs() <= 1e-9 * perf.abs().max(1.0));
            prop_assert!(edge.perf >= 0.0 && (0.0..=1.0).contains(&edge.weight_norm));
            *counted.entry(edge.class.to_string()).or_default() += edge.count as usize;
        }
        prop_assert_eq!(counted, per_class);
    }

    #[test]
    fn drill_is_a_consistent_idempotent_sub_log(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let snap = snapshot(seed);
        prop_assume!(!snap.a2a().edges().is_empty());
        let key = snap.a2a().edges()[pick.index(snap.a2a().edges().len())].key();
        let once = edge_drill_filter(&snap, std::slice::from_ref(&key)).unwrap();
        let eo: BTreeSet<_> = snap.log().eo().collect();
        prop_assert!(once.log().eo().all(|pair| eo.contains(&pair)));
        let rebuilt = ModelSnapshot::build(once.log().clone());
        prop_assert_eq!(rebuilt.a2a(), once.a2a());
        prop_assert_eq!(rebuilt.e2e(), once.e2e());
        let twice = edge_drill_filter(&once, std::slice::from_ref(&key)).unwrap();
        prop_assert_eq!(&twice, &once);
    }

    #[test]
    fn drill_results_shrink(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let snap = snapshot(seed);
        prop_assume!(!snap.a2a().edges().is_empty());
        let key = snap.a2a().edges()[pick.index(snap.a2a().edges().len())].key();
        let out = edge_drill_filter(&snap, std::slice::from_ref(&key)).unwrap();
        prop_assert!(out.log().events().len() <= snap.log().events().len());
        prop_assert!(out.a2a().edge(&key).is_some());
        prop_assert!(out.log().events().iter().all(|e| snap.log().event(e.id.as_str()) == Some(e)));
    }

    #[test]
    fn case_notion_properties(seed in any::<u64>(), omega in 0.01f64..=1.0, delta in 0.0f64..0.5, window in 0usize..3) {
        let plain = random_log(seed, RandomLogShape::default());
        let log = to_log(&plain);
        for class in plain.objects.iter().map(|(_, c)| c.clone()).collect::<BTreeSet<_>>() {
            let class = ObjectClass::new(class).unwrap();
            let Ok(cases) = case_notion(&log, &ProjectionParams::new(class.clone(), omega, window).unwrap()) else {
                continue;
            };
            for case in &cases {
                let o1 = case.source_object.as_ref().unwrap();
                let events: BTreeSet<_> = case.events().iter().map(|e| e.as_str()).collect();
                prop_assert!(log.related_events(o1.as_str()).unwrap().iter().all(|e| events.contains(e.as_str())));
            }

            let strict = ProjectionParams::new(class.clone(), (omega + delta).min(1.0), 0).unwrap();
            let loose = ProjectionParams::new(class.clone(), omega, 0).unwrap();
            let strict = case_notion(&log, &strict).unwrap();
            let loose = case_notion(&log, &loose).unwrap();
            for (s, l) in strict.iter().zip(&loose) {
                prop_assert_eq!(&s.id, &l.id);
                let l: BTreeSet<_> = l.events().iter().collect();
                prop_assert!(s.events().iter().all(|e| l.contains(e)));
            }

            let exact = case_notion(&log, &ProjectionParams::new(class, 1.0, 0).unwrap()).unwrap();
            for case in &exact {
                let g = log.related_events(case.source_object.as_ref().unwrap().as_str()).unwrap();
                prop_assert_eq!(case.events().iter().collect::<Vec<_>>(), g);
            }

            let clog = project(&log, cases).unwrap();
            for (_, trace) in clog.traces() {
                prop_assert!(trace.windows(2).all(|w| compare_events(w[0], w[1]).is_lt()));
            }
        }
    }
}
