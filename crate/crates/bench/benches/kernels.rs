use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fastescape_core::growth::iterate;
use fastescape_core::regularity::check_strong_log_regular;
use fastescape_core::{build_phi, GrowthModel, Magnitude, ScanConfig, Step, Tolerance};

fn magnitude_ops(c: &mut Criterion) {
    let x = Magnitude::new(3, 1.7).unwrap();
    let y = Magnitude::new(3, 1.7000001).unwrap();
    c.bench_function("magnitude/mul_scalar_l3", |b| {
        b.iter(|| black_box(&x).mul_scalar(black_box(2.5)))
    });
    c.bench_function("magnitude/pow_scalar_l3", |b| {
        b.iter(|| black_box(&x).pow_scalar(black_box(0.75)))
    });
    c.bench_function("magnitude/compare_l3", |b| {
        b.iter(|| black_box(&x).compare(black_box(&y), Tolerance::default()))
    });
    c.bench_function("magnitude/exp_ln_round_trip", |b| {
        b.iter(|| black_box(&x).exp().ln())
    });
}

fn mu_iteration(c: &mut Criterion) {
    let model = GrowthModel::exp_order(1.0).unwrap();
    let start = Magnitude::from_ln(20.0).unwrap();
    let step = Step::Mu { m: 2, eps: 0.75 };
    c.bench_function("growth/mu2_iterates_8", |b| {
        b.iter(|| iterate(step, &model, black_box(start), 8))
    });
}

fn strong_scan(c: &mut Criterion) {
    let model = GrowthModel::exp_order(1.0).unwrap();
    let cfg = ScanConfig::new(2.3, 50.0).with_grid(256);
    c.bench_function("regularity/strong_256", |b| {
        b.iter(|| check_strong_log_regular(&model, 0.5, 3.0, black_box(&cfg)))
    });
}

fn construction(c: &mut Criterion) {
    c.bench_function("construction/build_phi_12", |b| {
        b.iter(|| build_phi(black_box(0.5), 5.0, 4.0, 12))
    });
}

criterion_group!(
    benches,
    magnitude_ops,
    mu_iteration,
    strong_scan,
    construction
);
criterion_main!(benches);
