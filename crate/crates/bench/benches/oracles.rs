use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use kmkdv_core::closed_forms::{r_family_fields, ClosedFormParams};
use kmkdv_core::darboux::compound_dt_zero_seed;
use kmkdv_core::family::Family;
use kmkdv_core::harness::{pde_residual, ResidualOptions};
use kmkdv_core::real::Ext;

fn oracles(c: &mut Criterion) {
    let p = ClosedFormParams::with_ratio(1.0, 0.5).unwrap();
    c.bench_function("r_family_fields", |b| b.iter(|| r_family_fields(1.0, 0.5, black_box(0.3), black_box(0.1)).unwrap()));
    c.bench_function("compound_dt_zero_seed", |b| b.iter(|| compound_dt_zero_seed(&p, black_box(0.3), black_box(0.1)).unwrap()));

    let fam = Family::r_family(1.0, 0.5).unwrap();
    let sys = fam.governing_system();
    let opts = ResidualOptions::default();
    let point = [(0.3, 0.1)];
    let mut group = c.benchmark_group("pde_residual");
    group.sample_size(20);
    group.bench_function("f64", |b| b.iter(|| pde_residual::<f64>(&fam, &sys, black_box(&point), &opts).unwrap()));
    group.bench_function("extended", |b| b.iter(|| pde_residual::<Ext>(&fam, &sys, black_box(&point), &opts).unwrap()));
    group.finish();
}

criterion_group!(benches, oracles);
criterion_main!(benches);
