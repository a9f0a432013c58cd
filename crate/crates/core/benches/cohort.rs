use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vreal_core::bayes::{bf10_grid, Direction, DEFAULT_PRIOR_SCALE};
use vreal_core::config::ScoringConfig;
use vreal_core::par::Execution;
use vreal_core::sim::{simulate_cohort, ParticipantProfile};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn cohort(c: &mut Criterion) {
    let config = ScoringConfig::default();
    let mut group = c.benchmark_group("simulate_cohort");
    for size in [25usize, 200] {
        let seeds: Vec<u64> = (0..size as u64).collect();
        let profiles = vec![ParticipantProfile::typical(); size];
        for (name, execution) in MODES {
            group.bench_with_input(BenchmarkId::new(name, size), &size, |b, _| {
                b.iter(|| simulate_cohort(black_box(&profiles), black_box(&seeds), &config, execution).unwrap())
            });
        }
    }
    group.finish();
}

fn grid(c: &mut Criterion) {
    let ts: Vec<f64> = (0..24).map(|i| f64::from(i) * 0.25).collect();
    let ns = [12usize, 25, 50];
    let mut group = c.benchmark_group("bf10_grid");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| bf10_grid(black_box(&ts), black_box(&ns), DEFAULT_PRIOR_SCALE, Direction::ALess, execution).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, cohort, grid);
criterion_main!(benches);
