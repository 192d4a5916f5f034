//! Benchmarks for the per-point pipeline stages and a small sweep row.
//! Run with `cargo bench -p wgmsim-bench`.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use wgmsim::{
    build_linear_model, eigen_stability, evaluate_point, log_negativity, reduce_cm, run_sweep,
    solve_lyapunov, solve_steady_state, Axis, Bipartition, OutputKind, SweepSpec,
};
use wgmsim_bench::{baseline_cm, baseline_config, baseline_point};

fn bench_stages(c: &mut Criterion) {
    let config = baseline_config();
    let (resolved, steady, model) = baseline_point();
    let cm = baseline_cm();

    c.bench_function("resolve_config", |b| {
        b.iter(|| black_box(&config).resolve().unwrap())
    });
    c.bench_function("steady_state", |b| {
        b.iter(|| solve_steady_state(black_box(&resolved.derived), &resolved.drive).unwrap())
    });
    c.bench_function("linear_model_and_stability", |b| {
        b.iter(|| {
            let m = build_linear_model(black_box(&steady), &resolved.derived);
            eigen_stability(&m).unwrap()
        })
    });
    c.bench_function("lyapunov_solve", |b| {
        b.iter(|| solve_lyapunov(black_box(&model)).unwrap())
    });
    c.bench_function("log_negativity_both_pairs", |b| {
        b.iter(|| {
            let cw = log_negativity(&reduce_cm(black_box(&cm), Bipartition::CwMech)).unwrap();
            let ccw = log_negativity(&reduce_cm(&cm, Bipartition::CcwMech)).unwrap();
            (cw.e_n, ccw.e_n)
        })
    });
    c.bench_function("point_pipeline_full", |b| {
        b.iter(|| evaluate_point(black_box(&config)).unwrap())
    });
}

fn bench_sweep_row(c: &mut Criterion) {
    // One 16-node detuning row, both entanglement outputs: the unit of work
    // that large figure sweeps repeat.
    let spec = SweepSpec::new(
        baseline_config(),
        vec![Axis::linear("drive.detuning_ratio", 0.1, 1.6, 16)],
        vec![OutputKind::EnCw, OutputKind::EnCcw],
    );
    c.bench_function("sweep_row_16_nodes", |b| {
        b.iter(|| run_sweep(black_box(&spec)).unwrap())
    });
}

criterion_group!(benches, bench_stages, bench_sweep_row);
criterion_main!(benches);
