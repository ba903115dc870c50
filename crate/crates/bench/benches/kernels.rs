use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rmp_bench::Fixture;
use rmp_core::fourier::{
    approximants, make_kernel, phi_aggregates, smoothed_density_from_cf, theta, PartitionOfUnity, PhaseSign,
    WindowFunction,
};
use rmp_core::montecarlo::{exact_functionals, run_sigma_dist};
use rmp_core::projective::cocycle;
use rmp_core::spectral::{leading_eigen, PowerOptions};

fn walks(c: &mut Criterion) {
    let f = Fixture::benchmark();
    let g = &f.measure.atoms()[0];
    c.bench_function("cocycle", |b| b.iter(|| cocycle(black_box(g), black_box(&f.x))));

    let mut group = c.benchmark_group("sigma_dist");
    group.sample_size(10);
    for n in [64usize, 1024] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| run_sigma_dist(&f.measure, &f.x, &f.y, n, 10_000, 7, 1).unwrap())
        });
    }
    group.finish();

    c.bench_function("exact_functionals/12", |b| b.iter(|| exact_functionals(&f.measure, &f.x, &f.y, 12).unwrap()));
}

fn operators(c: &mut Criterion) {
    let f = Fixture::benchmark();
    let mut group = c.benchmark_group("transfer_apply");
    for size in [512usize, 4096] {
        let op = f.operator(size);
        let v = vec![Complex64::new(1.0, 0.0); size];
        group.bench_with_input(BenchmarkId::from_parameter(size), &size, |b, _| {
            b.iter(|| op.apply(Complex64::new(0.0, 0.3), black_box(&v)))
        });
    }
    group.finish();

    let op = f.operator(1024);
    c.bench_function("leading_eigen/1024", |b| {
        b.iter(|| leading_eigen(&op, Complex64::new(0.0, 0.2), PowerOptions::default(), None).unwrap())
    });
}

fn smoothing(c: &mut Criterion) {
    c.bench_function("theta", |b| b.iter(|| theta(black_box(3.7))));

    let k = make_kernel(0.25).unwrap();
    let psi = WindowFunction::upper(-0.5, 0.5, 0.25).unwrap();
    let mut group = c.benchmark_group("fourier");
    group.sample_size(10);
    group.bench_function("approximants", |b| b.iter(|| approximants(&psi, k).unwrap()));
    let cf = |xi: f64| Complex64::new(-0.5 * xi * xi, 0.0).exp();
    group.bench_function("inversion", |b| b.iter(|| smoothed_density_from_cf(cf, &k, black_box(0.4))));
    group.finish();

    let f = Fixture::benchmark();
    let part = PartitionOfUnity::build(&f.y, 0.25, 64).unwrap();
    c.bench_function("phi_aggregates/4096", |b| {
        b.iter(|| phi_aggregates(&part, 4096, 0.7, 1.5, 0.25, PhaseSign::Plus).unwrap())
    });
}

criterion_group!(benches, walks, operators, smoothing);
criterion_main!(benches);
