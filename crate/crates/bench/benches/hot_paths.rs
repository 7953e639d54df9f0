//! Benchmarks for the estimator and test hot paths.
//!
//! Inputs are simulated from the benchmark designs so timings reflect
//! realistic tie patterns and censoring. The permutation engine dominates
//! every higher-level routine, so the suite times it at the component
//! level (one Gray evaluation), at the battery level (all five tests on a
//! shared permutation matrix), and at the harness level (a small Monte
//! Carlo cell).

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rmtl::{
    aalen_johansen, combined_tests, gray_permutation_test, gray_test, kaplan_meier, rmtl,
    run_monte_carlo, select_tau, simulate_dataset, Cause, EventSet, PermutationPlan, Sample,
    Scenario, ScenarioConfig,
};

fn dataset(per_group: usize, censoring: f64, seed: u64) -> Sample {
    let config = ScenarioConfig::new(Scenario::A, per_group, per_group, censoring, seed);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    simulate_dataset(&config, &mut rng).expect("benchmark dataset simulates")
}

fn estimator_benches(c: &mut Criterion) {
    let sample = dataset(200, 0.30, 11);
    c.bench_function("aalen_johansen/n=400", |b| {
        b.iter(|| aalen_johansen(black_box(&sample), Cause::Interest).unwrap());
    });
    c.bench_function("kaplan_meier/n=400", |b| {
        b.iter(|| kaplan_meier(black_box(&sample), EventSet::both()).unwrap());
    });
    let cif = aalen_johansen(&sample, Cause::Interest).unwrap();
    let tau = select_tau(&sample).unwrap();
    c.bench_function("rmtl/n=400", |b| {
        b.iter(|| rmtl(black_box(&cif), black_box(tau)).unwrap());
    });
}

fn test_benches(c: &mut Criterion) {
    let sample = dataset(100, 0.30, 12);
    let tau = select_tau(&sample).unwrap();
    c.bench_function("gray_test/n=200", |b| {
        b.iter(|| gray_test(black_box(&sample)).unwrap());
    });
    let plan = PermutationPlan::new(200, 13);
    c.bench_function("gray_permutation_test/n=200,B=200", |b| {
        b.iter(|| gray_permutation_test(black_box(&sample), &plan).unwrap());
    });
    c.bench_function("combined_tests/n=200,B=200", |b| {
        b.iter(|| combined_tests(black_box(&sample), black_box(tau), 0.05, &plan).unwrap());
    });
}

fn harness_benches(c: &mut Criterion) {
    let mut config = ScenarioConfig::new(Scenario::A, 50, 50, 0.30, 14);
    config.replications = 20;
    config.permutations = 100;
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.measurement_time(Duration::from_secs(10));
    group.bench_function("cell/50x50,reps=20,B=100", |b| {
        b.iter(|| run_monte_carlo(black_box(&config)).unwrap());
    });
    group.finish();
}

criterion_group!(benches, estimator_benches, test_benches, harness_benches);
criterion_main!(benches);
