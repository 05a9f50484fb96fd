use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use optoblock::experiment::{run_sweep, Axis, Observable, Route, RunSettings, SweepParameter, SweepSpec, Threads};
use optoblock::model::{SystemParams, TruncationSpec};

// Threads(Some(1)) runs the points one after another; Threads(None) uses
// every core. Without the `parallel` feature both are sequential.
fn numeric_sweep(c: &mut Criterion) {
    let spec = SweepSpec::new(
        Axis::new(SweepParameter::Delta1, -0.1, 0.2, 8),
        Route::Numeric,
        &[Observable::G1, Observable::G2, Observable::G12],
    );
    let p = SystemParams::reference();
    let trunc = TruncationSpec::new(2, 2, 2);
    let settings = RunSettings::default();
    let mut group = c.benchmark_group("numeric_sweep_8_points");
    group.sample_size(10);
    for (name, threads) in [("sequential", Threads(Some(1))), ("parallel", Threads(None))] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &threads, |b, &threads| {
            b.iter(|| run_sweep(&spec, &p, trunc, &settings, threads))
        });
    }
    group.finish();
}

fn analytic_sweep(c: &mut Criterion) {
    let spec = SweepSpec::new(
        Axis::new(SweepParameter::Delta1, -0.8, 0.8, 2001),
        Route::Analytic,
        &[Observable::G1, Observable::G2, Observable::G12],
    );
    let p = SystemParams::reference();
    let settings = RunSettings::default();
    let mut group = c.benchmark_group("analytic_sweep_2001_points");
    for (name, threads) in [("sequential", Threads(Some(1))), ("parallel", Threads(None))] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &threads, |b, &threads| {
            b.iter(|| run_sweep(&spec, &p, TruncationSpec::default(), &settings, threads))
        });
    }
    group.finish();
}

criterion_group!(benches, numeric_sweep, analytic_sweep);
criterion_main!(benches);
