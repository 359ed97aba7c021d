//! Throughput comparison of the data-parallel and sequential execution modes
//! for the ratio-preservation test and the full classifier.
//!
//! Tetrad generation is sequential in both modes (it is what makes runs
//! reproducible), so the parallel speedup shows up in the evaluation phase
//! and grows with `n_tetrads`. Build with `--no-default-features` to measure
//! the rayon-free fallback, in which both modes run the same sequential code.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use moebius_kit::{
    classify_with_mode, non_moebius_zoo, phi_test_with_mode, Complex64, DiskRegion, ExecMode,
    MoebiusMap, PhiTestConfig, SampledMap,
};

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fixture_moebius() -> SampledMap {
    let region = DiskRegion::new(c64(0.0, 0.0), 2.0).unwrap();
    let f = MoebiusMap::new(c64(1.0, 0.5), c64(0.3, -0.2), c64(0.1, 0.1), c64(1.0, 0.0)).unwrap();
    SampledMap::from_moebius(&f, region)
}

fn phi_throughput(c: &mut Criterion) {
    let moebius = fixture_moebius();
    let square = non_moebius_zoo()
        .into_iter()
        .find(|e| e.name == "square")
        .expect("zoo has a squaring map")
        .map;

    let mut group = c.benchmark_group("phi_test");
    group.sample_size(30);
    for &n in &[200usize, 1000, 4000] {
        let cfg = PhiTestConfig::new(c64(2.0, 0.0), n, 1e-9, 42).unwrap();
        for (mode, label) in [(ExecMode::Sequential, "sequential"), (ExecMode::Parallel, "parallel")] {
            group.bench_with_input(BenchmarkId::new(label, n), &cfg, |b, cfg| {
                b.iter(|| black_box(phi_test_with_mode(black_box(&moebius), cfg, mode).unwrap()))
            });
            group.bench_with_input(
                BenchmarkId::new(format!("{label}_violating"), n),
                &cfg,
                |b, cfg| {
                    b.iter(|| {
                        black_box(phi_test_with_mode(black_box(&square), cfg, mode).unwrap())
                    })
                },
            );
        }
    }
    group.finish();
}

fn classify_throughput(c: &mut Criterion) {
    let moebius = fixture_moebius();
    let cfg = PhiTestConfig::new(c64(2.0, 0.0), 1000, 1e-9, 42).unwrap();

    let mut group = c.benchmark_group("classify");
    group.sample_size(20);
    for (mode, label) in [(ExecMode::Sequential, "sequential"), (ExecMode::Parallel, "parallel")] {
        group.bench_function(label, |b| {
            b.iter(|| black_box(classify_with_mode(black_box(&moebius), &cfg, mode).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, phi_throughput, classify_throughput);
criterion_main!(benches);
