use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qcd_bench::{circuit_pair, identity_and_dephase, state_pair};
use qcd_core::distances::{diamond_norm, fidelity, max_image_fidelity, trace_distance, OptimizerConfig};
use qcd_core::reductions::ci_to_qcd;
use qcd_core::choi_of;

fn quick() -> OptimizerConfig {
    OptimizerConfig {
        restarts: 4,
        ..OptimizerConfig::with_seed(1)
    }
}

fn state_measures(c: &mut Criterion) {
    let mut group = c.benchmark_group("states");
    for qubits in [1, 2, 3, 4] {
        let (rho, xi) = state_pair(qubits, 7);
        group.bench_with_input(BenchmarkId::new("trace_distance", qubits), &qubits, |b, _| {
            b.iter(|| trace_distance(&rho, &xi).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fidelity", qubits), &qubits, |b, _| {
            b.iter(|| fidelity(&rho, &xi).unwrap())
        });
    }
    group.finish();
}

fn channel_measures(c: &mut Criterion) {
    let mut group = c.benchmark_group("channels");
    group.sample_size(10);
    for n in [1, 2] {
        let (q0, q1) = circuit_pair(n, 11);
        group.bench_with_input(BenchmarkId::new("choi_of", n), &n, |b, _| b.iter(|| choi_of(&q0).unwrap()));
        let (ch0, ch1) = (choi_of(&q0).unwrap(), choi_of(&q1).unwrap());
        group.bench_with_input(BenchmarkId::new("diamond_norm", n), &n, |b, _| {
            b.iter(|| diamond_norm(&ch0, &ch1, &quick()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("max_image_fidelity", n), &n, |b, _| {
            b.iter(|| max_image_fidelity(&q0, &q1, &quick()).unwrap())
        });
    }
    let (id, d) = identity_and_dephase();
    let (r0, r1) = ci_to_qcd(&id, &d).unwrap();
    let (c0, c1) = (choi_of(&r0).unwrap(), choi_of(&r1).unwrap());
    group.bench_function("diamond_norm/reduced_pair", |b| b.iter(|| diamond_norm(&c0, &c1, &quick()).unwrap()));
    group.finish();
}

criterion_group!(benches, state_measures, channel_measures);
criterion_main!(benches);
