use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use originality::distances::{euclidean_matrix_with, levenshtein_matrix_with};
use originality::heatmap::heatmap_grid_with;
use originality::{score_all_with, Bounds, Execution, FeatureVectors, PotentialSpec, ScoreConfig, Variant};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn cloud(n: usize, dim: usize, seed: u64) -> FeatureVectors {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FeatureVectors::unlabeled((0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect()).unwrap()
}

fn words(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.random_range(10..60);
            (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect()
        })
        .collect()
}

fn euclidean(c: &mut Criterion) {
    let mut group = c.benchmark_group("euclidean_matrix");
    for n in [200, 1000] {
        let v = cloud(n, 32, 1);
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, n), &v, |b, v| {
                b.iter(|| euclidean_matrix_with(black_box(v), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn scoring(c: &mut Criterion) {
    let mut group = c.benchmark_group("score_all");
    let d = euclidean_matrix_with(&cloud(1000, 8, 2), Execution::Parallel).unwrap();
    let configs = [
        ("coulomb", ScoreConfig::default()),
        ("power_mean", ScoreConfig::new(PotentialSpec::Coulomb, Variant::GeneralizedMean { p: -2.0 })),
        ("j_nearest", ScoreConfig::new(PotentialSpec::Coulomb, Variant::JNearest { j: 10, include_self_row: false })),
    ];
    for (label, config) in configs {
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, label), &config, |b, config| {
                b.iter(|| score_all_with(black_box(&d), config, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn edit_distance(c: &mut Criterion) {
    let mut group = c.benchmark_group("levenshtein_matrix");
    group.sample_size(20);
    let texts = words(300, 3);
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| levenshtein_matrix_with(black_box(&texts), exec).unwrap()));
    }
    group.finish();
}

fn heatmap(c: &mut Criterion) {
    let mut group = c.benchmark_group("heatmap_100x100");
    let points = cloud(60, 2, 4);
    let bounds = Bounds::around(&points, 0.1).unwrap();
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| heatmap_grid_with(black_box(&points), bounds, (100, 100), &PotentialSpec::Coulomb, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, euclidean, scoring, edit_distance, heatmap);
criterion_main!(benches);
