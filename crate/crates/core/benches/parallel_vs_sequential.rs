use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperhs::identities::{verify_dh_coset_u11, verify_guhr_wettig};
use hyperhs::korbital::{ingham_siegel_check, z_moment_mc, ModelParams};
use hyperhs::quadrature::{DampingSchedule, McConfig};
use hyperhs::sampling::VarianceProfile;
use hyperhs::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn guhr_wettig(c: &mut Criterion) {
    let mut g = c.benchmark_group("guhr_wettig_mc");
    g.sample_size(10);
    let cfg = McConfig::new(100_000, 1);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                verify_guhr_wettig(
                    &[1.2, 0.5],
                    &[1.0, 0.4],
                    (&[1.0, 0.3], &[0.8, 0.2]),
                    &cfg,
                    black_box(exec),
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

fn korbital_moment(c: &mut Criterion) {
    let mut g = c.benchmark_group("korbital_moment_mc");
    g.sample_size(10);
    let model = ModelParams::new(1, 0.0, 1.0).unwrap();
    let profile = VarianceProfile::new(1.0, 0.5, 4, 2).unwrap();
    let cfg = McConfig::new(50_000, 1);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| z_moment_mc(&model, &profile, &cfg, black_box(exec)).unwrap())
        });
    }
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("quadrature");
    g.sample_size(10);
    let schedule = DampingSchedule::default();
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new("dh_damped", name), |b| {
            b.iter(|| {
                verify_dh_coset_u11(
                    [2.0, -0.5],
                    [1.5, -0.8],
                    ([1.0, -1.0], [1.0, -1.0]),
                    &schedule,
                    black_box(exec),
                )
                .unwrap()
            })
        });
        g.bench_function(BenchmarkId::new("ingham_siegel", name), |b| {
            b.iter(|| ingham_siegel_check([1.5, 0.7], [1.0, 1.0], 3, 0.4, 1.0, black_box(exec)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, guhr_wettig, korbital_moment, quadrature);
criterion_main!(benches);
