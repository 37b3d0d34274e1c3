use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::f64::consts::PI;
use std::hint::black_box;

use pulsewalk::bloch::{default_initial_states, log_space, scaling_slope_with, worst_case_deviations, DEFAULT_SEED};
use pulsewalk::catalog::{self, scan_alpha};
use pulsewalk::{Channel, Exec};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn slope_fit(c: &mut Criterion) {
    let seq = catalog::knill();
    let states = default_initial_states(DEFAULT_SEED);
    let mut group = c.benchmark_group("scaling_slope");
    for (label, exec) in MODES {
        group.bench_function(BenchmarkId::new(label, "knill/26 states/25 pts"), |b| {
            b.iter(|| scaling_slope_with(&seq, Channel::Amplitude, &states, (1e-4, 1e-2), 25, exec).unwrap())
        });
    }
    group.finish();
}

fn alpha_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan_alpha");
    for (label, exec) in MODES {
        group.bench_function(BenchmarkId::new(label, "2001 α"), |b| {
            b.iter(|| scan_alpha(Channel::Detuning, -PI, PI, black_box(2001), exec).unwrap())
        });
    }
    group.finish();
}

fn deviation_grid(c: &mut Criterion) {
    let seq = catalog::magic_amplitude().unwrap();
    let states = default_initial_states(DEFAULT_SEED);
    let errors = log_space(1e-4, 5e-2, 200);
    let mut group = c.benchmark_group("worst_case_deviations");
    for (label, exec) in MODES {
        group.bench_function(BenchmarkId::new(label, "200 errors × 26 states"), |b| {
            b.iter(|| worst_case_deviations(&seq, Channel::Amplitude, &states, &errors, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, slope_fit, alpha_scan, deviation_grid);
criterion_main!(benches);
