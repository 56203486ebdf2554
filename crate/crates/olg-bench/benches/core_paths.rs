//! Benchmarks for the hot paths: forward simulation, closed-form scenario
//! construction, full two-agent verification, and the best-response search.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use olg_core::scenarios::{cobb_douglas_bubble_path, cobb_douglas_params, fiat_continuum_path};
use olg_core::{
    best_response_search, map_olg_to_two_cycle, olg_step, simulate_olg, verify_two_cycle_full,
    OlgState, PriceSystem, SequenceSpec, TruncatedProblem,
};

/// Knife-edge initial fiat price of the benchmark economy
/// (alpha = 0.3, A = 1, beta = 0.9, K0 = 1).
fn critical_price() -> f64 {
    cobb_douglas_bubble_path(0.3, 1.0, 0.9, 1.0, 0.0, 2).expect("benchmark economy").special_values
        ["b_bar"]
}

fn bubble_paths(c: &mut Criterion) {
    let b_bar = critical_price();
    let mut group = c.benchmark_group("cobb_douglas_bubble_path");
    group.sample_size(20);
    for horizon in [200usize, 500] {
        group.bench_function(format!("critical_h{horizon}"), |b| {
            b.iter(|| {
                cobb_douglas_bubble_path(0.3, 1.0, 0.9, 1.0, black_box(b_bar), horizon)
                    .expect("knife-edge path")
            })
        });
    }
    group.finish();
}

fn production_step(c: &mut Criterion) {
    let params = cobb_douglas_params(0.3, 1.0, 0.9, 1.0);
    let b_bar = critical_price();
    let state = OlgState { capital: 1.0, tree_price: 0.0, fiat_price: b_bar };
    c.bench_function("olg_step_production", |b| {
        b.iter(|| olg_step(&params, black_box(&state), 0).expect("interior step"))
    });
}

fn fiat_path(c: &mut Criterion) {
    let young = SequenceSpec::Geometric { base: 70.0, ratio: 8.0 / 7.0 };
    let old = SequenceSpec::Geometric { base: 35.0, ratio: 8.0 / 7.0 };
    c.bench_function("fiat_continuum_path_h100", |b| {
        b.iter(|| {
            fiat_continuum_path(&young, &old, 2.0, 7.0 / 8.0, black_box(14.0), 100)
                .expect("stationary path")
        })
    });
}

fn full_verification(c: &mut Criterion) {
    let params = cobb_douglas_params(0.3, 1.0, 0.9, 1.0);
    let b_bar = critical_price();
    let path = simulate_olg(&params, 0.0, b_bar, 200).expect("critical path");
    let alloc = map_olg_to_two_cycle(&params, &path).expect("bridge");
    let prices = PriceSystem::from_path(&path);
    c.bench_function("verify_two_cycle_full_h200", |b| {
        b.iter(|| verify_two_cycle_full(&params, black_box(&alloc), &prices, 1e-10))
    });
}

fn oracle_search(c: &mut Criterion) {
    let params = cobb_douglas_params(0.3, 1.0, 0.9, 1.0);
    let b_bar = critical_price();
    let path = simulate_olg(&params, 0.0, b_bar, 16).expect("critical path");
    let alloc = map_olg_to_two_cycle(&params, &path).expect("bridge");
    let prices = PriceSystem::from_path(&path);
    let problem =
        TruncatedProblem::from_candidate(&params, &alloc, &prices, 0, 8).expect("truncation");
    let mut group = c.benchmark_group("best_response_search");
    group.sample_size(10);
    group.bench_function("grid65_t8", |b| {
        b.iter(|| best_response_search(black_box(&problem), 65))
    });
    group.finish();
}

criterion_group!(
    benches,
    bubble_paths,
    production_step,
    fiat_path,
    full_verification,
    oracle_search
);
criterion_main!(benches);
