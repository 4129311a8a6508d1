//! Rayon vs. forced-sequential timings for the three data-parallel kernels:
//! Monte Carlo estimation, grid maximization of the hard-instance bounds,
//! and the LP rate sweep. Both paths produce bit-identical results (the
//! test suite asserts this); these benches measure what the parallelism
//! actually buys on the current machine.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use prophet_lab::bounds::{grid_maximize, observe_accept_surface, two_threshold_surface};
use prophet_lab::dist::Distribution;
use prophet_lab::policy::PolicySpec;
use prophet_lab::{exec, sim, tune};

const MODES: [(&str, bool); 2] = [("parallel", false), ("sequential", true)];

fn bench_estimate(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate");
    group.sample_size(10);
    let spec = PolicySpec::KThreshold {
        c: vec![0.7067, 1.8353],
        rho: vec![0.6204, 0.3796],
    };
    let dist = Distribution::uniform(0.0, 1.0).unwrap();
    for (label, seq) in MODES {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            exec::set_sequential_only(seq);
            b.iter(|| sim::estimate(&spec, &dist, 200, 1 << 17, 11).unwrap());
            exec::set_sequential_only(false);
        });
    }
    group.finish();
}

fn bench_grid_maximize(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_maximize");
    group.sample_size(10);
    let oa = observe_accept_surface();
    let two = two_threshold_surface(400);
    for (label, seq) in MODES {
        group.bench_function(BenchmarkId::new("observe_accept", label), |b| {
            exec::set_sequential_only(seq);
            b.iter(|| grid_maximize(&oa, 120, 1).unwrap());
            exec::set_sequential_only(false);
        });
        group.bench_function(BenchmarkId::new("two_threshold", label), |b| {
            exec::set_sequential_only(seq);
            b.iter(|| grid_maximize(&two, 40, 1).unwrap());
            exec::set_sequential_only(false);
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep_c");
    group.sample_size(10);
    let cs: Vec<f64> = (1..=6).map(|i| 0.25 * i as f64).collect();
    for (label, seq) in MODES {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            exec::set_sequential_only(seq);
            b.iter(|| tune::sweep_c(&cs, 10, 1.03, 11, 2).unwrap());
            exec::set_sequential_only(false);
        });
    }
    group.finish();
}

criterion_group!(benches, bench_estimate, bench_grid_maximize, bench_sweep);
criterion_main!(benches);
