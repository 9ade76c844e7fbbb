use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eigu_bench::{blobs, DIMENSIONS};
use eigu_core::classifiers::{train, TrainSpec};
use eigu_core::kernels::KernelSpec;

fn linear_training(c: &mut Criterion) {
    let mut group = c.benchmark_group("linear_training");
    for n in DIMENSIONS {
        let data = blobs(100, 40, n);
        for spec in [
            TrainSpec::gepsvm(1e-3),
            TrainSpec::igepsvm(1e-3, 0.01),
            TrainSpec::ugepsvm(1e-3),
            TrainSpec::iugepsvm(1e-3, 0.01, 1e-4),
        ] {
            group.bench_with_input(BenchmarkId::new(spec.classifier.name(), n), &data, |b, d| {
                b.iter(|| train(d, &spec).unwrap())
            });
        }
    }
    group.finish();
}

fn kernel_training(c: &mut Criterion) {
    let mut group = c.benchmark_group("rbf_training");
    group.sample_size(10);
    for m in [50, 100, 200] {
        let data = blobs(m, m / 2, 16);
        let spec = TrainSpec::iugepsvm(1e-3, 0.01, 1e-4).with_kernel(KernelSpec::rbf(4.0).unwrap());
        group.bench_with_input(BenchmarkId::from_parameter(m), &data, |b, d| {
            b.iter(|| train(d, &spec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, linear_training, kernel_training);
criterion_main!(benches);
