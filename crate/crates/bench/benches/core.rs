use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use gcm_bench::geometric_config;
use gcm_core::presets::{table_model, TableMode};
use gcm_core::simulation::replication_rng;
use gcm_core::{generate, giant_size, node_percolate, SolveOptions};

fn generation(c: &mut Criterion) {
    let config = geometric_config(100_000, 0.5, 1);
    c.bench_function("generate n=1e5", |b| b.iter(|| generate(black_box(&config)).unwrap()));
}

fn components(c: &mut Criterion) {
    let graph = generate(&geometric_config(100_000, 0.5, 1)).unwrap();
    c.bench_function("percolate+giant n=1e5 phi=0.6", |b| {
        b.iter_batched(
            || replication_rng(7, 0),
            |mut rng| giant_size(&node_percolate(&graph, 0.6, &mut rng)),
            BatchSize::SmallInput,
        )
    });
}

fn analytics(c: &mut Criterion) {
    let model = table_model(3, TableMode::Rotator, 0.5).unwrap();
    c.bench_function("solve_fixed_point b=3 phi=0.9", |b| {
        b.iter(|| model.solve_fixed_point(black_box(0.9), SolveOptions::default()).unwrap())
    });
    c.bench_function("critical_phi b=3", |b| b.iter(|| black_box(&model).critical_phi().unwrap()));
    c.bench_function("critical_phi_numeric b=3", |b| {
        b.iter(|| black_box(&model).critical_phi_numeric(1e-5))
    });
}

criterion_group!(benches, generation, components, analytics);
criterion_main!(benches);
