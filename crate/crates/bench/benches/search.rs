use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use sigcat_bench::planted;
use sigcat_core::randomize::generate_group;
use sigcat_core::{acc, ksigcat_run, ClusterCounts, NullMethod, Objective, SearchConfig};

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("ksigcat_run");
    for n in [500usize, 1000, 2000, 4000] {
        let ds = planted(n, 16, 4, 5, 0.7, 1);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("srs", n), &ds, |b, ds| {
            b.iter(|| ksigcat_run(black_box(ds), &SearchConfig::new(5, 7)).unwrap())
        });
    }
    let ds = planted(1000, 16, 4, 5, 0.7, 1);
    group.bench_function("ee/1000", |b| {
        b.iter(|| ksigcat_run(&ds, &SearchConfig::new(5, 7).with_objective(Objective::ExpectedEntropy)).unwrap())
    });
    group.finish();
}

fn delta(c: &mut Criterion) {
    let ds = planted(2000, 32, 6, 8, 0.6, 2);
    let assignments: Vec<usize> = (0..ds.n_objects()).map(|i| i % 8).collect();
    let mut group = c.benchmark_group("delta_move");
    for objective in [Objective::Srs, Objective::ExpectedEntropy] {
        let counts = ClusterCounts::new(&ds, &assignments, 8, objective).unwrap();
        group.bench_function(format!("{objective:?}"), |b| {
            let mut i = 0;
            b.iter(|| {
                i = (i + 1) % ds.n_objects();
                let from = assignments[i];
                counts.delta_move(ds.row(i), from, (from + 1) % 8).unwrap()
            })
        });
    }
    group.finish();
}

fn null_group(c: &mut Criterion) {
    let ds = planted(500, 16, 4, 4, 0.7, 3);
    let mut group = c.benchmark_group("null_group");
    group.sample_size(10);
    for method in [NullMethod::Swap, NullMethod::Randperm] {
        group.bench_function(format!("{method}/r20"), |b| {
            b.iter(|| {
                let g = generate_group(&ds, 20, method, 5).unwrap();
                g.null_values(&SearchConfig::new(4, 9)).unwrap()
            })
        });
    }
    group.finish();
}

fn metrics(c: &mut Criterion) {
    let n = 10_000;
    let pred: Vec<usize> = (0..n).map(|i| (i * 7) % 30).collect();
    let truth: Vec<usize> = (0..n).map(|i| i % 30).collect();
    c.bench_function("acc/10000x30", |b| b.iter(|| acc(black_box(&pred), black_box(&truth)).unwrap()));
}

criterion_group!(benches, search, delta, null_group, metrics);
criterion_main!(benches);
