//! Benchmarks for the stages that dominate scan runtimes: prolate basis
//! construction, the weak-pump analysis, and the double-pair click
//! quadrature on both engine paths.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use heraldsim::defaults::Numerics;
use heraldsim::{
    build_basis, click_probabilities, heralded_psi1, schmidt_decompose, FreqGrid, Heralding,
};
use heraldsim_bench::{default_numerics, optimum_filter, state1, state5};
use std::hint::black_box;

fn bench_prolate(c: &mut Criterion) {
    let filter = optimum_filter();
    let mut group = c.benchmark_group("prolate_basis");
    for &nodes in &[64usize, 128] {
        group.bench_with_input(BenchmarkId::from_parameter(nodes), &nodes, |b, &n| {
            b.iter(|| build_basis(black_box(&filter), n, 1e-6, 32).unwrap());
        });
    }
    group.finish();
}

fn bench_weak_pump_analysis(c: &mut Criterion) {
    let src = state1();
    let filter = optimum_filter();
    let numerics = default_numerics();
    c.bench_function("weak_pump_analysis", |b| {
        b.iter(|| Heralding::new(black_box(&src), &filter, &numerics).unwrap());
    });
}

fn bench_psi1(c: &mut Criterion) {
    let src = state1();
    let basis = build_basis(&optimum_filter(), 64, 1e-6, 32).unwrap();
    let idler = FreqGrid::gauss_legendre(4.0, 64).unwrap();
    c.bench_function("heralded_psi1", |b| {
        b.iter(|| heralded_psi1(&basis, black_box(&src), &idler));
    });
}

fn bench_double_pair_clicks(c: &mut Criterion) {
    let numerics = Numerics {
        nodes: 32,
        ..Numerics::default()
    };
    let idler = FreqGrid::gauss_legendre(4.0, numerics.nodes).unwrap();
    let mut group = c.benchmark_group("double_pair_clicks_32");
    group.sample_size(20);
    // Separable engine (mu_i = 0) versus the general kernel path.
    let sep_basis = build_basis(&optimum_filter(), numerics.nodes, 1e-6, 32).unwrap();
    let src_sep = state1();
    group.bench_function("separable", |b| {
        b.iter(|| click_probabilities(&sep_basis, black_box(&src_sep), &idler));
    });
    let gen_basis = build_basis(&optimum_filter(), numerics.nodes, 1e-6, 32).unwrap();
    let src_gen = state5();
    group.bench_function("general", |b| {
        b.iter(|| click_probabilities(&gen_basis, black_box(&src_gen), &idler));
    });
    group.finish();
}

fn bench_schmidt(c: &mut Criterion) {
    let src = state1();
    let grid = FreqGrid::gauss_legendre(4.0, 64).unwrap();
    c.bench_function("schmidt_decompose_64", |b| {
        b.iter(|| schmidt_decompose(black_box(&src), &grid).unwrap());
    });
}

criterion_group!(
    benches,
    bench_prolate,
    bench_weak_pump_analysis,
    bench_psi1,
    bench_double_pair_clicks,
    bench_schmidt
);
criterion_main!(benches);
