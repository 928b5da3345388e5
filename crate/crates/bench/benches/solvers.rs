use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use slnet::pipeline::{solve_ndbd, solve_spanner, SolveParams};
use slnet::rsp::{min_cost_path_relaxed, min_weight_path_hassin, rsp_exact};
use slnet::slst::{shallow_light, SlstParams};
use slnet::thin_lp::{satisfiable_pairs, solve_fractional, LpConfig};
use slnet_bench::{ndbd_instance, slst_instance, spanner_instance};

fn rsp(c: &mut Criterion) {
    let g = ndbd_instance(40, 1).graph;
    let costs: Vec<f64> = g.edges().iter().map(|e| e.cost as f64).collect();
    let mut group = c.benchmark_group("rsp");
    group.bench_function("exact", |b| b.iter(|| rsp_exact(&g, 0, 39, black_box(30))));
    group.bench_function("relaxed", |b| b.iter(|| min_cost_path_relaxed(&g, 0, 39, black_box(30.0), 0.25)));
    group.bench_function("hassin", |b| b.iter(|| min_weight_path_hassin(&g, &costs, 0, 39, black_box(30), 0.25)));
    group.finish();
}

fn slst(c: &mut Criterion) {
    let mut group = c.benchmark_group("shallow_light");
    group.sample_size(10);
    for n in [10, 20, 30] {
        let inst = slst_instance(n, 2);
        for level in [1, 2] {
            group.bench_with_input(BenchmarkId::new(format!("level{level}"), n), &inst, |b, inst| {
                b.iter(|| shallow_light(inst, &SlstParams::new(level, 0.25)).unwrap())
            });
        }
    }
    group.finish();
}

fn lp(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_fractional");
    group.sample_size(10);
    for n in [10, 20] {
        let inst = ndbd_instance(n, 3);
        let demands = satisfiable_pairs(&inst.graph, |_| inst.bound);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| solve_fractional(&inst.graph, &demands, &LpConfig::new(0.25)).unwrap())
        });
    }
    group.finish();
}

fn pipelines(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipelines");
    group.sample_size(10);
    let ndbd = ndbd_instance(15, 4);
    group.bench_function("ndbd_n15", |b| b.iter(|| solve_ndbd(&ndbd, &SolveParams::new(0.5, 2, 1)).unwrap()));
    let spanner = spanner_instance(15, 5);
    group.bench_function("spanner_n15", |b| {
        b.iter(|| solve_spanner(&spanner, &SolveParams::new(0.5, 2, 1)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, rsp, slst, lp, pipelines);
criterion_main!(benches);
