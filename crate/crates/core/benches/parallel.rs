use criterion::{criterion_group, criterion_main, Criterion};
use kpp_halfline::exec;
use kpp_halfline::halfline::{solve, Field, Grid, Kpp};
use kpp_halfline::harness::random::ordered_pair;
use kpp_halfline::reaction::Reaction;

fn workload(i: &u64) -> f64 {
    let r = Reaction::logistic();
    let g = Grid::new(50.0, 1000, 0.025).unwrap();
    let (u, _) = ordered_pair(0, *i, &g);
    let tr = solve(Kpp(&r), &g, &Field::new(0.0, u), 1.0, &[1.0]).unwrap();
    tr.snapshots[0].u.iter().sum()
}

fn bench(c: &mut Criterion) {
    let items: Vec<u64> = (0..16).collect();
    let mut group = c.benchmark_group("solve-16-pairs");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| exec::map_sequential(&items, workload)));
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| b.iter(|| exec::map_parallel(&items, workload)));
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
