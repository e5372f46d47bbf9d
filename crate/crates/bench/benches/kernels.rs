//! Criterion benchmarks for the hot kernels: the Jacobi eigensolver, the
//! divergence evaluations, the measured-divergence optimizer, and the
//! instance enumeration plus bound pipeline.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qgb_core::bounds::{bound_kl, bound_renyi, BoundKind};
use qgb_core::divergence::{
    measured_renyi, modified_sandwiched, petz_renyi, sandwiched_renyi, MeasuredOptConfig,
};
use qgb_core::learning::{induce, random_instance, RandomInstanceConfig};
use qgb_core::operator::{herm_eig, random_density, random_hermitian, HilbertSpace};

fn space(d: usize) -> HilbertSpace {
    HilbertSpace::single("q", d).unwrap()
}

fn bench_eig(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi_eig");
    for dim in [4usize, 8, 16, 32] {
        let h = random_hermitian(&space(dim), 1.0, dim as u64);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &h, |b, h| {
            b.iter(|| herm_eig(h).unwrap())
        });
    }
    group.finish();
}

fn bench_divergences(c: &mut Criterion) {
    let mut group = c.benchmark_group("divergence");
    for dim in [2usize, 4, 8] {
        let rho = random_density(&space(dim), dim, 11).unwrap();
        let sigma = random_density(&space(dim), dim, 13).unwrap();
        group.bench_with_input(BenchmarkId::new("petz", dim), &dim, |b, _| {
            b.iter(|| petz_renyi(&rho, &sigma, 0.7).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sandwiched", dim), &dim, |b, _| {
            b.iter(|| sandwiched_renyi(&rho, &sigma, 0.7).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("modified", dim), &dim, |b, _| {
            b.iter(|| modified_sandwiched(&rho, &sigma, 0.3).unwrap())
        });
    }
    group.finish();
}

fn bench_measured(c: &mut Criterion) {
    let mut group = c.benchmark_group("measured");
    group.sample_size(10);
    for dim in [2usize, 4] {
        let rho = random_density(&space(dim), dim, 17).unwrap();
        let sigma = random_density(&space(dim), dim, 19).unwrap();
        let cfg = MeasuredOptConfig::fast(23);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, _| {
            b.iter(|| measured_renyi(&rho, &sigma, 2.0, &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let instance = random_instance(&RandomInstanceConfig {
        seed: 29,
        ..Default::default()
    })
    .unwrap();
    c.bench_function("induce", |b| b.iter(|| induce(&instance).unwrap()));

    let joint = induce(&instance).unwrap();
    c.bench_function("bound_kl", |b| {
        b.iter(|| bound_kl(&joint, &instance).unwrap())
    });
    let alphas = qgb_core::bounds::log_spaced(0.1, 0.95, 9);
    c.bench_function("bound_renyi_mod_9pt", |b| {
        b.iter(|| bound_renyi(&joint, &instance, &alphas, &alphas, BoundKind::RenyiMod).unwrap())
    });
}

criterion_group!(benches, bench_eig, bench_divergences, bench_measured, bench_pipeline);
criterion_main!(benches);
