//! Sequential versus rayon execution for the census and batch crossover.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use iodgraph::census::{run_census_with, CensusConfig};
use iodgraph::crossover::{crossover_many, CrossoverStrategy};
use iodgraph::generate::{random_graph, RandomGraphSpec};
use iodgraph::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    for m in [4, 5] {
        let config = CensusConfig::standard(3, 2, m);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("3-2-{m}")), &config, |b, cfg| {
                b.iter(|| run_census_with(black_box(cfg), exec, None).unwrap())
            });
        }
    }
    group.finish();
}

fn sampled_census(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampled_census");
    let config = CensusConfig::standard(3, 2, 7).sampled(500, 7);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| run_census_with(black_box(&config), exec, None).unwrap()));
    }
    group.finish();
}

fn batch_crossover(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = RandomGraphSpec::default();
    let graphs: Vec<_> = (0..256).map(|_| random_graph(&mut rng, &spec)).collect();
    let pairs: Vec<_> = graphs.chunks(2).map(|p| (&p[0], &p[1])).collect();
    let strategy = CrossoverStrategy::default();
    let mut group = c.benchmark_group("crossover_many");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| crossover_many(black_box(&pairs), &strategy, 11, exec)));
    }
    group.finish();
}

criterion_group!(benches, census, sampled_census, batch_crossover);
criterion_main!(benches);
