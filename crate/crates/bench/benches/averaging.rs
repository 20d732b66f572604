use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use eoa_core::decoupling::convergence_sweep;
use eoa_core::{
    bangbang_average, euler_cycle_full, eulerian_average, eulerian_oa_from_code, gf_new, hamming_code, oa_from_code, random_drift,
    AverageMethod, EulerianOA,
};

fn averaging(c: &mut Criterion) {
    let code = hamming_code(Arc::new(gf_new(2, 2).unwrap()), 2).unwrap().dual();
    let oa = oa_from_code(&code, 3).unwrap();
    let eoa = eulerian_oa_from_code(&code, &euler_cycle_full(4, 2).unwrap(), 2).unwrap();
    let h = random_drift(5, 2, 2, 2, 7).unwrap();

    c.bench_function("bangbang_average 5 qubits", |b| b.iter(|| bangbang_average(black_box(&oa), &h).unwrap()));

    let mut group = c.benchmark_group("eulerian_average 5 qubits");
    group.sample_size(20);
    group.bench_function("exact", |b| b.iter(|| eulerian_average(black_box(&eoa), &h, 0.1, AverageMethod::Exact).unwrap()));
    group.bench_function("quadrature 24", |b| {
        b.iter(|| eulerian_average(black_box(&eoa), &h, 0.1, AverageMethod::Quadrature { order: 24 }).unwrap())
    });
    group.finish();

    let two = EulerianOA::new(eoa.entries().select_rows(&[0, 1]), 4, 2).unwrap();
    let h2 = random_drift(2, 2, 2, 2, 7).unwrap();
    let mut group = c.benchmark_group("exact evolution");
    group.sample_size(10);
    group.bench_function("convergence sweep 2 qubits", |b| b.iter(|| convergence_sweep(black_box(&h2), &two, 2.5e-4, 3, 1).unwrap()));
    group.finish();
}

criterion_group!(benches, averaging);
criterion_main!(benches);
