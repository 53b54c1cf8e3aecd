use criterion::{criterion_group, criterion_main, Criterion};
use mpmd_bench::{concave_workload, size_based_workload};
use mpmd_core::concave::solve_concave;
use mpmd_core::solve_nonclairvoyant;

fn nonclairvoyant(c: &mut Criterion) {
    let inst = size_based_workload(8, 1);
    c.bench_function("nonclairvoyant_m8", |b| b.iter(|| solve_nonclairvoyant(&inst).unwrap()));
}

fn concave(c: &mut Criterion) {
    let inst = concave_workload(16, 1);
    c.bench_function("concave_m16", |b| b.iter(|| solve_concave(&inst).unwrap()));
}

criterion_group!(benches, nonclairvoyant, concave);
criterion_main!(benches);
