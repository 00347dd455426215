use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use type2_amp::estimators::{brute_force_oracle_with, evaluate_estimator, Method};
use type2_amp::harness::{generate_sb_amplitudes, run_sweep_with, trial_rng, SweepConfig};
use type2_amp::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn estimators(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimator");
    for s in [4, 10, 20] {
        let x = generate_sb_amplitudes(s, 4.0, 1.0, &mut trial_rng(1, 0, 0, 0)).unwrap();
        for method in Method::ALL {
            group.bench_with_input(BenchmarkId::new(method.name(), s), &x, |b, x| {
                b.iter(|| evaluate_estimator(black_box(x), method).unwrap())
            });
        }
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let x = generate_sb_amplitudes(10, 4.0, 1.0, &mut trial_rng(2, 0, 0, 0)).unwrap();
    let mut group = c.benchmark_group("oracle_1e5");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| brute_force_oracle_with(black_box(&x), 100_000, exec).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let config = SweepConfig {
        variances: vec![0.1, 4.0],
        min_amplitudes: vec![1.0],
        trials: 2_000,
        ..Default::default()
    };
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| run_sweep_with(black_box(&config), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, estimators, oracle, sweep);
criterion_main!(benches);
