use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sperner::par::default_threads;
use sperner::search::{exact_comp_table, exact_search, Objective, SearchConfig, SearchMode};

fn thread_counts() -> Vec<usize> {
    let many = default_threads().max(2);
    vec![1, many]
}

fn comp_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("comp_table_n5");
    group.sample_size(10);
    for threads in thread_counts() {
        group.bench_with_input(BenchmarkId::from_parameter(threads), &threads, |b, &t| {
            b.iter(|| exact_comp_table(5, t).unwrap())
        });
    }
    group.finish();
}

fn exact(c: &mut Criterion) {
    for (n, k, obj) in [(5, 3, Objective::Product), (5, 2, Objective::Sum)] {
        let mut group = c.benchmark_group(format!("exact_{obj}_{n}_{k}"));
        group.sample_size(10);
        for threads in thread_counts() {
            let cfg = SearchConfig::new(n, k, obj, SearchMode::Exact).with_threads(threads);
            group.bench_with_input(BenchmarkId::from_parameter(threads), &cfg, |b, cfg| {
                b.iter(|| exact_search(cfg).unwrap())
            });
        }
        group.finish();
    }
}

criterion_group!(benches, comp_table, exact);
criterion_main!(benches);
