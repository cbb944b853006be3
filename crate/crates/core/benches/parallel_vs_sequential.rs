//! Experiment throughput on one worker against the full rayon pool.
//!
//! Run `cargo bench -p blockgraph` for the parallel build and
//! `cargo bench -p blockgraph --no-default-features` for the sequential
//! fallback, where both groups run on the calling thread.

use std::hint::black_box;

use blockgraph::decompose::{select_root, RootHeuristic, DEFAULT_CANDIDATE_BUDGET};
use blockgraph::graph::gen_random_regular;
use blockgraph::harness::{run_experiment, Algorithm, ExperimentConfig, GraphSpec};
use blockgraph::model::PotentialKind;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn experiment_config(workers: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        GraphSpec::Grid { rows: 6, cols: 6 },
        vec![PotentialKind::Repulsive, PotentialKind::Mixed],
        vec![0.5, 1.0],
        vec![Algorithm::Bp, Algorithm::Block(2), Algorithm::Block(3)],
    );
    cfg.trials = 8;
    cfg.master_seed = 11;
    cfg.workers = workers;
    cfg.record_timing = false;
    cfg
}

fn experiments(c: &mut Criterion) {
    let mut group = c.benchmark_group("experiment_6x6");
    group.sample_size(10);
    for (label, workers) in [("one_worker", 1), ("pool", 0)] {
        let cfg = experiment_config(workers);
        group.bench_with_input(BenchmarkId::from_parameter(label), &cfg, |b, cfg| {
            b.iter(|| black_box(run_experiment(cfg).unwrap()))
        });
    }
    group.finish();
}

fn root_selection(c: &mut Criterion) {
    let g = gen_random_regular(100, 4, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let mut group = c.benchmark_group("select_root_regular_100_4");
    for heuristic in [RootHeuristic::GreedyDegree, RootHeuristic::GreedyFillin] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{heuristic:?}")), &heuristic, |b, &h| {
            b.iter(|| black_box(select_root(&g, h, DEFAULT_CANDIDATE_BUDGET).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, experiments, root_selection);
criterion_main!(benches);
