use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use steptda::detect::{rpm_persistence, PersistenceOptions};
use steptda::harness::{run_sweep_with, Exec, Plane, SweepConfig};
use steptda::signal::{simulate_accordion, NominalTrain};
use steptda::spectral::rpm_fourier;

fn sweep(c: &mut Criterion) {
    let cfg = SweepConfig {
        grid: (6, 6),
        replicates: 5,
        ..Default::default()
    };
    let mut g = c.benchmark_group("sweep_6x6x5");
    g.sample_size(10);
    g.bench_function("sequential", |b| {
        b.iter(|| run_sweep_with(black_box(&cfg), Plane::Epsilon, Exec::Sequential).unwrap())
    });
    #[cfg(feature = "parallel")]
    g.bench_function("parallel", |b| {
        b.iter(|| run_sweep_with(black_box(&cfg), Plane::Epsilon, Exec::Parallel).unwrap())
    });
    g.finish();
}

fn estimators(c: &mut Criterion) {
    let opts = PersistenceOptions::default();
    let mut g = c.benchmark_group("estimators");
    for k in [12u32, 14, 16, 18] {
        let n = 1usize << k;
        let mut model = NominalTrain::default().model(3178.0, 0.1, 0.0, 48824);
        model.window_s = [0.0, (n - 1) as f64 * model.dt_s];
        let ts = simulate_accordion(&model).unwrap();
        g.throughput(Throughput::Elements(n as u64));
        g.bench_with_input(BenchmarkId::new("persistence", n), &ts, |b, ts| {
            b.iter(|| rpm_persistence(black_box(ts), &opts).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("fourier", n), &ts, |b, ts| {
            b.iter(|| rpm_fourier(black_box(ts), 3.0).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sweep, estimators);
criterion_main!(benches);
