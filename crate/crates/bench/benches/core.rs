use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use heatgrow_core::controller::FeedbackGain;
use heatgrow_core::kernel::{forward_transform, p_kernel, KernelParams};
use heatgrow_core::pdesolver::{log_spaced_times, Advection, DecayTrace, FieldState, SchemeConfig, Stepper, TraceSample};
use heatgrow_core::stability::classify_window;
use heatgrow_core::BoundaryCurve;

const SIZES: [usize; 3] = [100, 400, 1600];

fn curve() -> BoundaryCurve {
    BoundaryCurve::power_law(1.0, 0.5).unwrap()
}

fn state(n: usize) -> FieldState {
    FieldState::from_fn(curve(), n, |y| (PI * y).sin()).unwrap()
}

fn theta_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("theta_step");
    for n in SIZES {
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let cfg = SchemeConfig {
                n_grid: n,
                dt: 1e-3,
                theta: 0.5,
                advection: Advection::Centered,
                t_final: 1.0,
            };
            let mut stepper = Stepper::new(cfg).unwrap();
            let init = state(n);
            b.iter_batched_ref(
                || init.clone(),
                |s| stepper.advance(s, 1e-3, 0.0).unwrap(),
                BatchSize::SmallInput,
            );
        });
    }
    group.finish();
}

fn kernel_series(c: &mut Criterion) {
    let mut group = c.benchmark_group("p_kernel");
    for lambda in [1.0, 6.5, 25.0] {
        let p = KernelParams::new(lambda).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(lambda), &p, |b, p| {
            b.iter(|| p_kernel(p, black_box(2.0), black_box(0.7)).unwrap());
        });
    }
    group.finish();
}

fn feedback(c: &mut Criterion) {
    let p = KernelParams::new(6.5).unwrap();
    let mut group = c.benchmark_group("feedback");
    for n in SIZES {
        let s = state(n);
        let gain = FeedbackGain::new(&s, &p).unwrap();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("cached_gain", n), &s, |b, s| {
            b.iter(|| gain.apply(black_box(s)).unwrap());
        });
        group.bench_with_input(BenchmarkId::new("fresh_gain", n), &s, |b, s| {
            b.iter(|| FeedbackGain::new(black_box(s), &p).unwrap());
        });
    }
    group.finish();
}

fn transform(c: &mut Criterion) {
    let p = KernelParams::new(6.5).unwrap();
    let mut group = c.benchmark_group("forward_transform");
    group.sample_size(20);
    for n in [100, 400] {
        let s = state(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &s, |b, s| {
            b.iter(|| forward_transform(black_box(s), &p).unwrap());
        });
    }
    group.finish();
}

fn classify(c: &mut Criterion) {
    let samples = log_spaced_times(20.0, 100.0, 200)
        .into_iter()
        .map(|t| {
            let norm = (-1.5 * t.sqrt()).exp();
            TraceSample { t, l: 1.0, norm, energy: norm * norm, control: None }
        })
        .collect();
    let trace = DecayTrace { samples, non_monotone_boundary: false };
    c.bench_function("classify_200_samples", |b| {
        b.iter(|| classify_window(black_box(&trace), 1.0, (20.0, 100.0)).unwrap());
    });
}

criterion_group!(benches, theta_step, kernel_series, feedback, transform, classify);
criterion_main!(benches);
