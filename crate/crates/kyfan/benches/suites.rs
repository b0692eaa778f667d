use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kyfan::{run_suite, SuiteConfig, SuiteKind};

fn bench_suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    for kind in [
        SuiteKind::Metric,
        SuiteKind::PovmBound,
        SuiteKind::Contractivity,
    ] {
        for sequential in [true, false] {
            let label = if sequential { "sequential" } else { "parallel" };
            group.bench_with_input(
                BenchmarkId::new(kind.name(), label),
                &sequential,
                |b, &sequential| {
                    let mut config = SuiteConfig::new(4, 64, 7);
                    config.sequential = sequential;
                    b.iter(|| run_suite(kind, &config).unwrap());
                },
            );
        }
    }
    group.finish();
}

criterion_group!(benches, bench_suites);
criterion_main!(benches);
