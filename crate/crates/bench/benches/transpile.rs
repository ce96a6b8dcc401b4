use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qtv_core::device::CouplingMap;
use qtv_core::gen::{self, GateSet};
use qtv_core::passes::{basic_swap, lookahead_swap, parse_pipeline, run_pass_manager, LookaheadConfig, ManagerOptions};
use qtv_core::validator::validate_swap_insertion;
use qtv_core::DAGCircuit;

fn routing(c: &mut Criterion) {
    let map = CouplingMap::ibmqx5();
    let mut g = c.benchmark_group("routing");
    for gates in [20, 80] {
        let circ = gen::random_circuit(&mut gen::rng(gates as u64), 16, gates, &GateSet::clifford_t());
        let dag = DAGCircuit::from_circuit(&circ);
        g.bench_with_input(BenchmarkId::new("basic_swap", gates), &dag, |b, d| {
            b.iter(|| basic_swap(black_box(d), &map, None).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("lookahead_swap", gates), &dag, |b, d| {
            b.iter(|| lookahead_swap(black_box(d), &map, None, LookaheadConfig::default()).unwrap())
        });
        let routed = basic_swap(&dag, &map, None).unwrap();
        g.bench_with_input(BenchmarkId::new("validate_swaps", gates), &routed, |b, m| {
            b.iter(|| validate_swap_insertion(&circ, black_box(m)).unwrap())
        });
    }
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let map = CouplingMap::line(5);
    let circ = gen::random_circuit(&mut gen::rng(5), 5, 30, &GateSet::unitary());
    let passes = parse_pipeline("commutation_analysis,commutative_cancellation,optimize_1q_gates,basic_swap").unwrap();
    let mut g = c.benchmark_group("pipeline");
    for checked in [false, true] {
        let opts = ManagerOptions {
            check_contracts: checked,
            ..ManagerOptions::default()
        };
        let label = if checked { "checked" } else { "unchecked" };
        g.bench_function(label, |b| b.iter(|| run_pass_manager(&passes, black_box(&circ), Some(&map), opts).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, routing, pipeline);
criterion_main!(benches);
