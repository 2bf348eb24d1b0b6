use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use kmkdv_bench::coupled_fixture;
use kmkdv_core::scheme::{discrete_rhs, stability_exponent, step};

fn rhs_and_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("scheme");
    for h in [0.2, 0.1, 0.05] {
        let (coeffs, grid, state) = coupled_fixture(h);
        group.bench_with_input(BenchmarkId::new("discrete_rhs", h), &h, |b, _| {
            b.iter(|| discrete_rhs(black_box(&state), &coeffs, &grid).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("step", h), &h, |b, _| {
            b.iter(|| step(black_box(&state), &coeffs, &grid, 1e-7).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("stability_exponent", h), &h, |b, _| {
            b.iter(|| stability_exponent(black_box(&state), &coeffs, &grid, 1e-7).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, rhs_and_step);
criterion_main!(benches);
