use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use eqwave::geometry::DepthColumn;
use eqwave::mean_flow::{column_means, mean_flow_report};
use eqwave::model::{jacobian, LagrangianLabel};
use eqwave::sweep;
use eqwave::{PhysicalConstants, WaveConfig};

fn config() -> WaveConfig {
    WaveConfig::new(100.0, 0.0, -5.0, PhysicalConstants::equatorial()).unwrap()
}

fn mean_flow_grid(c: &mut Criterion) {
    let cfg = config();
    let s: Vec<f64> = (0..4).map(|i| i as f64 * 2.5e4).collect();
    let z0: Vec<f64> = (0..8).map(|i| -20.0 - 10.0 * i as f64).collect();
    let points = sweep::product(&s, &z0);
    let tol = 1e-10 * cfg.c();
    let eval = |&(s, z0): &(f64, f64)| mean_flow_report(s, z0, 0.0, &cfg, tol).unwrap().mean_eulerian.value;

    let mut group = c.benchmark_group("mean_flow_grid");
    group.sample_size(10);
    group.bench_with_input(BenchmarkId::new("sequential", points.len()), &points, |b, p| {
        b.iter(|| black_box(sweep::map_seq(p, eval)))
    });
    #[cfg(feature = "parallel")]
    group.bench_with_input(BenchmarkId::new("parallel", points.len()), &points, |b, p| {
        b.iter(|| black_box(sweep::map_par(p, eval)))
    });
    group.finish();
}

fn column_quadrature(c: &mut Criterion) {
    let cfg = config();
    let column = DepthColumn::new(&cfg, 0.0, -20.0).unwrap();
    let tol = [1e-10 * cfg.c(); 4];
    c.bench_function("column_means", |b| b.iter(|| black_box(column_means(&column, 0.0, tol).unwrap())));
}

fn jacobian_samples(c: &mut Criterion) {
    let cfg = config();
    let labels: Vec<LagrangianLabel> = (0..20_000)
        .map(|i| LagrangianLabel::new(i as f64 * 0.37 % 100.0, -5.0 - (i % 97) as f64, (i % 13) as f64 * 1e4))
        .collect();
    let eval = |l: &LagrangianLabel| jacobian(l, 1.5, &cfg).unwrap().determinant;

    let mut group = c.benchmark_group("jacobian_samples");
    group.bench_with_input(BenchmarkId::new("sequential", labels.len()), &labels, |b, l| {
        b.iter(|| black_box(sweep::map_seq(l, eval)))
    });
    #[cfg(feature = "parallel")]
    group.bench_with_input(BenchmarkId::new("parallel", labels.len()), &labels, |b, l| {
        b.iter(|| black_box(sweep::map_par(l, eval)))
    });
    group.finish();
}

criterion_group!(benches, mean_flow_grid, column_quadrature, jacobian_samples);
criterion_main!(benches);
