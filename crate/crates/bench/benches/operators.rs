use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mslab_core::analysis::{extremal_space, pi_defect};
use mslab_core::blaschke::random_blaschke;
use mslab_core::harness::{run_experiment, ExperimentConfig};
use mslab_core::operators::{compress, BlockFrames};
use mslab_core::{BlaschkeProduct, CircleGrid, Frame, SymbolSpec, Truncation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn theta(degree: usize) -> BlaschkeProduct {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    random_blaschke(degree, 0.8, &mut rng).unwrap()
}

fn compressions(c: &mut Criterion) {
    let grid = CircleGrid::new(1024).unwrap();
    let th = theta(4);
    let u = theta(2);
    let phi = SymbolSpec::uv_bar(u, BlaschkeProduct::one());
    let mut group = c.benchmark_group("compress");
    for side in [32usize, 64, 108] {
        let frames = BlockFrames::new(&th, Truncation::symmetric(side), &grid).unwrap();
        group
            .bench_with_input(BenchmarkId::new("dtto", side), &frames, |b, f| b.iter(|| f.d(black_box(&phi)).unwrap()));
        group.bench_with_input(BenchmarkId::new("block", side), &frames, |b, f| {
            b.iter(|| f.block(black_box(&phi)).unwrap())
        });
    }
    // a model basis with nonzero zeros forces the quadrature route
    let model = Frame::model_basis(&th, &grid).unwrap();
    group.bench_function("tto_quadrature", |b| b.iter(|| compress(black_box(&phi), &model, &model, &grid).unwrap()));
    group.finish();
}

fn spectral(c: &mut Criterion) {
    let grid = CircleGrid::new(1024).unwrap();
    let th = theta(4);
    let phi = SymbolSpec::uv_bar(theta(2), BlaschkeProduct::one());
    let mut group = c.benchmark_group("spectral");
    group.sample_size(20);
    for side in [32usize, 108] {
        let d = BlockFrames::new(&th, Truncation::symmetric(side), &grid).unwrap().d(&phi).unwrap();
        group
            .bench_with_input(BenchmarkId::new("pi_defect", side), &d, |b, d| b.iter(|| pi_defect(black_box(d), 1e-8)));
        group.bench_with_input(BenchmarkId::new("extremal_space", side), &d, |b, d| {
            b.iter(|| extremal_space(black_box(d), 1e-6).unwrap())
        });
    }
    group.finish();
}

fn experiments(c: &mut Criterion) {
    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);
    for id in ["E2", "E7", "E10"] {
        let cfg = ExperimentConfig::new(id).with_seed(1).with_trials(5);
        group.bench_function(id, |b| b.iter(|| run_experiment(black_box(&cfg)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, compressions, spectral, experiments);
criterion_main!(benches);
