//! Scaling harness for the E2E and A2A builders.
//!
//! Logs of growing size (each twice the previous one by default) are built
//! repeatedly; the median build time per size is reported together with the
//! ratio between consecutive sizes. With linear builders the ratios stay
//! near 2.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::graphs::{build_a2a, build_e2e};
use crate::synthetic::{synthetic_log, SyntheticShape};

pub const MAX_RATIO: f64 = 2.5;
pub const TIME_BUDGET: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    /// Timed samples per size; the median is kept.
    pub samples: usize,
    /// Builds per sample, to get above timer noise.
    pub batch: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![10_000, 20_000, 40_000],
            samples: 9,
            batch: 5,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchPoint {
    pub eo_pairs: usize,
    pub events: usize,
    pub objects: usize,
    pub e2e_edges: usize,
    /// Median wall time of one E2E + A2A build, in milliseconds.
    pub median_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchReport {
    pub points: Vec<BenchPoint>,
    /// `median_ms[i + 1] / median_ms[i]`.
    pub ratios: Vec<f64>,
    pub total_secs: f64,
}

impl BenchReport {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_linear(&self) -> bool {
        self.ratios.iter().all(|&r| r <= MAX_RATIO) && self.total_secs < TIME_BUDGET.as_secs_f64()
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

pub fn run_bench(config: &BenchConfig) -> BenchReport {
    let started = Instant::now();
    let samples = config.samples.max(1);
    let batch = config.batch.max(1);
    let mut points = Vec::with_capacity(config.sizes.len());
    for &size in &config.sizes {
        let log = synthetic_log(SyntheticShape::with_pairs(size), config.seed);
        // Warm-up, also gives the edge count.
        let e2e_edges = build_e2e(&log).len();
        let times = (0..samples)
            .map(|_| {
                let t = Instant::now();
                for _ in 0..batch {
                    let e2e = build_e2e(&log);
                    std::hint::black_box(build_a2a(&log, &e2e));
                }
                t.elapsed().as_secs_f64() * 1e3 / batch as f64
            })
            .collect();
        let point = BenchPoint {
            eo_pairs: size,
            events: log.events().len(),
            objects: log.objects().len(),
            e2e_edges,
            median_ms: median(times),
        };
        log::info!("bench {} pairs: {:.3} ms", size, point.median_ms);
        points.push(point);
    }
    let ratios = points.windows(2).map(|w| w[1].median_ms / w[0].median_ms).collect();
    BenchReport {
        points,
        ratios,
        total_secs: started.elapsed().as_secs_f64(),
    }
}
