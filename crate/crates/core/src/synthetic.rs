//! Seeded generator of large logs for benchmarking.
//!
//! Every object is related to at most `max_degree` events, so the number of
//! E2E edges grows with the number of event-object pairs and nothing else.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Activity, DbEventLog, Event, EventId, ObjectClass, ObjectEntry, ObjectId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticShape {
    /// Number of event-object pairs to produce.
    pub eo_pairs: usize,
    pub classes: usize,
    pub activities: usize,
    pub max_degree: usize,
    /// Probability that an object reuses a recent event instead of creating
    /// a new one.
    pub share: f64,
}

impl SyntheticShape {
    pub fn with_pairs(eo_pairs: usize) -> Self {
        Self {
            eo_pairs,
            ..Self::default()
        }
    }
}

impl Default for SyntheticShape {
    fn default() -> Self {
        Self {
            eo_pairs: 10_000,
            classes: 3,
            activities: 8,
            max_degree: 6,
            share: 0.3,
        }
    }
}

const RECENT: usize = 64;

pub fn synthetic_log(shape: SyntheticShape, seed: u64) -> DbEventLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes: Vec<ObjectClass> = (0..shape.classes.max(1))
        .map(|k| ObjectClass::new(format!("class{k}")).expect("non-empty"))
        .collect();
    let activities: Vec<Activity> = (0..shape.activities.max(1))
        .map(|k| Activity::new(format!("act{k}")).expect("non-empty"))
        .collect();

    let mut events: Vec<Event> = Vec::new();
    let mut objects: Vec<ObjectEntry> = Vec::new();
    let mut eo: Vec<(EventId, ObjectId)> = Vec::with_capacity(shape.eo_pairs);
    let mut mine: Vec<usize> = Vec::with_capacity(shape.max_degree);

    while eo.len() < shape.eo_pairs {
        let oid = ObjectId::new(format!("o{}", objects.len())).expect("non-empty");
        objects.push(ObjectEntry {
            id: oid.clone(),
            class: classes[objects.len() % classes.len()].clone(),
        });
        let degree = rng
            .random_range(1..=shape.max_degree.max(1))
            .min(shape.eo_pairs - eo.len());
        mine.clear();
        for _ in 0..degree {
            let recent = events.len().min(RECENT);
            let reuse = recent > 0 && rng.random_bool(shape.share.clamp(0.0, 1.0));
            let pos = if reuse {
                events.len() - 1 - rng.random_range(0..recent)
            } else {
                usize::MAX
            };
            let pos = if pos != usize::MAX && !mine.contains(&pos) {
                pos
            } else {
                let n = events.len();
                events.push(Event::new(
                    EventId::new(format!("e{n}")).expect("non-empty"),
                    activities[rng.random_range(0..activities.len())].clone(),
                    n as i64 * 10 + rng.random_range(0..10),
                ));
                n
            };
            mine.push(pos);
            eo.push((events[pos].id.clone(), oid.clone()));
        }
    }
    DbEventLog::new(events, objects, eo).expect("generator produces consistent logs")
}
