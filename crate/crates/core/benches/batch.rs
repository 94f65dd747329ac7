use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rigidkit::batch::seq;
use rigidkit::{se3_exp, so3_exp, RotationVector, Transform, Twist, Vector3};

fn twists(n: usize) -> Vec<Twist> {
    (0..n)
        .map(|i| {
            let s = i as f64 * 1e-3;
            Twist::new(
                Vector3::new(s.sin(), s.cos(), s),
                Vector3::new(0.7 * s.cos(), -0.4, 2.0 * s.sin()),
            )
        })
        .collect()
}

fn bench_exp_log(c: &mut Criterion) {
    let mut group = c.benchmark_group("se3_exp_log");
    for n in [1_000usize, 100_000] {
        let xs = twists(n);
        let ts: Vec<Transform> = xs.iter().map(se3_exp).collect();
        group.bench_with_input(BenchmarkId::new("exp/sequential", n), &xs, |b, xs| {
            b.iter(|| seq::exp_all(black_box(xs)))
        });
        group.bench_with_input(BenchmarkId::new("log/sequential", n), &ts, |b, ts| {
            b.iter(|| seq::log_all(black_box(ts)))
        });
        #[cfg(feature = "parallel")]
        {
            use rigidkit::batch::par;
            group.bench_with_input(BenchmarkId::new("exp/parallel", n), &xs, |b, xs| {
                b.iter(|| par::exp_all(black_box(xs)))
            });
            group.bench_with_input(BenchmarkId::new("log/parallel", n), &ts, |b, ts| {
                b.iter(|| par::log_all(black_box(ts)))
            });
        }
    }
    group.finish();
}

fn bench_transform_points(c: &mut Criterion) {
    let t = Transform::new(
        so3_exp(&RotationVector::new(0.1, -0.5, 0.9)),
        Vector3::new(1.0, 2.0, 3.0),
    );
    let mut group = c.benchmark_group("transform_points");
    for n in [10_000usize, 1_000_000] {
        let pts: Vec<Vector3<f64>> = (0..n).map(|i| Vector3::new(i as f64, (i % 7) as f64, -1.0)).collect();
        group.bench_with_input(BenchmarkId::new("sequential", n), &pts, |b, pts| {
            b.iter(|| seq::transform_points(black_box(&t), black_box(pts)))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &pts, |b, pts| {
            b.iter(|| rigidkit::batch::par::transform_points(black_box(&t), black_box(pts)))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_exp_log, bench_transform_points);
criterion_main!(benches);
