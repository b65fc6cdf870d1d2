use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use foldsynth::synth::{total_error, Space};
use foldsynth::{assemble, find, synthesize, Limits, RunSeeds, Selection};
use foldsynth_bench::{quick_config, Workload};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run_fixtures(c: &mut Criterion) {
    let mut group = c.benchmark_group("fixture");
    for name in ["count-odds", "double-letters", "collatz-numbers", "last-index-of-zero", "vector-average"] {
        let w = Workload::fixture(name, 100);
        let program = assemble(&w.template, &w.genome).expect("fixture assembles");
        group.bench_function(name, |b| {
            b.iter(|| {
                for case in &w.cases {
                    black_box(program.run(black_box(&case.inputs), Limits::default()).ok());
                }
            })
        });
    }
    group.finish();
}

fn score_genomes(c: &mut Criterion) {
    let w = Workload::fixture("count-odds", 100);
    let generator = w.generator();
    let space = Space::new(&w.template, &generator, 5, false);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let genomes: Vec<_> = (0..200).map(|_| space.random_genome(&mut rng).expect("constructible")).collect();
    let scoring = w.scoring();
    c.bench_function("score/count-odds/200x100", |b| {
        b.iter(|| genomes.iter().map(|g| total_error(g, &w.template, &w.cases, &scoring)).sum::<f64>())
    });
}

fn variation(c: &mut Criterion) {
    let w = Workload::fixture("double-letters", 1);
    let generator = w.generator();
    let space = Space::new(&w.template, &generator, 5, false);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let parents: Vec<_> = (0..64).map(|_| space.random_genome(&mut rng).expect("constructible")).collect();
    c.bench_function("variation/random-genome", |b| b.iter(|| space.random_genome(&mut rng).ok()));
    c.bench_function("variation/mutate", |b| {
        b.iter_batched(|| parents[7].clone(), |g| space.mutate(&g, &mut rng), BatchSize::SmallInput)
    });
    c.bench_function("variation/crossover", |b| b.iter(|| space.crossover(&parents[3], &parents[9], &mut rng)));
}

fn search(c: &mut Criterion) {
    let p = find("count-odds").expect("registered");
    let config = quick_config(100, 5, 9);
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    group.bench_function("count-odds/pop100/gens5", |b| {
        b.iter(|| synthesize(&p, Selection::Auto, &config, RunSeeds::new(9, 0)).expect("search runs"))
    });
    group.finish();
}

criterion_group!(benches, run_fixtures, score_genomes, variation, search);
criterion_main!(benches);
