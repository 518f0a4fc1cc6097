//! Benchmarks for the hot paths: word counting, the tracing predicate,
//! greedy separated-set construction, and the weak-star measure distance.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ergolab_core::entropy::{max_separated, SepMethod};
use ergolab_core::measures::{empirical_measure, TestFunctionFamily};
use ergolab_core::tracing::is_traced;
use ergolab_core::{zoo, GapSchedule, Point, TracingInstance};

fn bench_count_words(c: &mut Criterion) {
    let golden = zoo::zoo("golden_mean_sft").unwrap();
    let closure = zoo::zoo("density_zero_subshift").unwrap();
    let mut group = c.benchmark_group("count_words");
    for n in [16usize, 32, 48] {
        group.bench_with_input(BenchmarkId::new("golden_mean", n), &n, |b, &n| {
            b.iter(|| golden.count_words(n).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("density_zero", n), &n, |b, &n| {
            b.iter(|| closure.count_words(n).unwrap())
        });
    }
    group.finish();
}

fn bench_is_traced(c: &mut Criterion) {
    let sys = zoo::zoo("full_shift(2)").unwrap();
    let landmarks = sys.landmarks();
    let mut group = c.benchmark_group("is_traced");
    for blocks in [4usize, 16] {
        let n = 32;
        let targets: Vec<Point> = (0..blocks)
            .map(|i| landmarks[i % landmarks.len()].clone())
            .collect();
        let schedule = GapSchedule::uniform(n, 1, blocks).unwrap();
        let inst = TracingInstance::new(targets, schedule, 0.1, 0.5).unwrap();
        // The constant-zero tracer: cheap to build, forces full scans.
        let tracer = landmarks[0].clone();
        group.bench_with_input(BenchmarkId::from_parameter(blocks), &blocks, |b, _| {
            b.iter(|| is_traced(&sys, &tracer, &inst).unwrap())
        });
    }
    group.finish();
}

fn bench_max_separated(c: &mut Criterion) {
    let rotation = zoo::zoo("golden_rotation").unwrap();
    let tent = zoo::zoo("tent").unwrap();
    let mut group = c.benchmark_group("max_separated_greedy");
    for n in [64usize, 256] {
        group.bench_with_input(BenchmarkId::new("rotation", n), &n, |b, &n| {
            b.iter(|| max_separated(&rotation, n, 0.01, SepMethod::Greedy, 4096).unwrap())
        });
    }
    group.bench_function("tent_n8", |b| {
        b.iter(|| max_separated(&tent, 8, 0.05, SepMethod::Greedy, 16384).unwrap())
    });
    group.finish();
}

fn bench_weak_star(c: &mut Criterion) {
    let sys = zoo::zoo("golden_rotation").unwrap();
    let fam = TestFunctionFamily::for_system(&sys).unwrap();
    let landmarks = sys.landmarks();
    let mu = empirical_measure(&sys, &landmarks[0], 4096).unwrap();
    let nu = empirical_measure(&sys, &landmarks[2], 4096).unwrap();
    c.bench_function("weak_star_distance_n4096", |b| {
        b.iter(|| ergolab_core::measures::weak_star_distance(&sys, &mu, &nu, &fam).unwrap())
    });
}

criterion_group!(
    benches,
    bench_count_words,
    bench_is_traced,
    bench_max_separated,
    bench_weak_star
);
criterion_main!(benches);
