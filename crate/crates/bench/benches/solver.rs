use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use multicut_bench::{grid, planar, torus};
use multicut_core::cutgraph::{build_cut_graph, cut_to_disk};
use multicut_core::oracle::{brute_force_multicut, max_flow_min_cut};
use multicut_core::topology::{enumerate_skeletons, Bounds};
use multicut_core::{solve_multicut, trace_faces, SolverConfig};
use std::hint::black_box;

fn solve(c: &mut Criterion) {
    let config = SolverConfig::default();
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    let g = planar(9, 14, 4, 1);
    group.bench_function("planar_14_edges_4_terminals", |b| b.iter(|| solve_multicut(black_box(&g), &config)));
    let g = torus(4, 8, 2, 1);
    group.bench_function("torus_8_edges_2_terminals", |b| b.iter(|| solve_multicut(black_box(&g), &config)));
    group.finish();
}

fn grids(c: &mut Criterion) {
    let config = SolverConfig::default();
    let mut group = c.benchmark_group("grid_three_terminals");
    group.sample_size(10);
    for k in [4, 6, 8, 10] {
        let g = grid(k, 3, 7);
        group.bench_with_input(BenchmarkId::from_parameter(g.num_edges()), &g, |b, g| {
            b.iter(|| solve_multicut(black_box(g), &config))
        });
    }
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    let g = planar(9, 14, 3, 2);
    group.bench_function("brute_force_14_edges", |b| b.iter(|| brute_force_multicut(black_box(&g))));
    let g = grid(8, 2, 3);
    let (s, t) = g.pairs()[0];
    group.bench_function("max_flow_8x8", |b| b.iter(|| max_flow_min_cut(black_box(&g), s, t)));
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let g = torus(3, 7, 2, 5);
    let faces = trace_faces(&g).unwrap();
    let k = build_cut_graph(&g, &faces).unwrap();
    let (_, schema) = cut_to_disk(&g, &faces, &k).unwrap();
    let limits = Bounds::default().limits_for_schema(2, 2, &schema);
    c.bench_function("skeletons_torus_two_terminals", |b| {
        b.iter(|| enumerate_skeletons(black_box(&schema), &limits, Some((g.pairs(), g.terminals()))))
    });
}

criterion_group!(benches, solve, grids, oracles, enumeration);
criterion_main!(benches);
