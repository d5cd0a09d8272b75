use std::hint::black_box;

use budgeted_efx::{efx_2a, efx_3a, knapsack_vmax, max_nsw_allocation, AlphaParams, Instance, SearchBudget};
use budgeted_efx_cli::generate::{GenConfig, Generator};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn instances(agents: usize, goods: usize, count: usize) -> Vec<Instance> {
    let config = GenConfig { agents, min_goods: goods, max_goods: goods, ..GenConfig::three_agent() };
    Generator::new(config, 7).unwrap().take(count).unwrap()
}

fn knapsack(c: &mut Criterion) {
    let mut group = c.benchmark_group("knapsack_vmax");
    for goods in [8, 12, 16] {
        let inst = &instances(1, goods, 1)[0];
        let pool = inst.all_goods();
        group.bench_with_input(BenchmarkId::from_parameter(goods), &goods, |b, _| {
            b.iter(|| knapsack_vmax(inst, 0, black_box(&pool), inst.budget(0)).unwrap())
        });
    }
    group.finish();
}

fn nash_optimum(c: &mut Criterion) {
    let mut group = c.benchmark_group("max_nsw_allocation");
    for goods in [5, 7, 9] {
        let inst = &instances(3, goods, 1)[0];
        let all = inst.all_goods();
        group.bench_with_input(BenchmarkId::from_parameter(goods), &goods, |b, _| {
            b.iter(|| max_nsw_allocation(inst, &[0, 1, 2], black_box(&all), &SearchBudget::default()).unwrap())
        });
    }
    group.finish();
}

fn two_agents(c: &mut Criterion) {
    let insts = instances(2, 10, 20);
    let seeds: Vec<_> = insts
        .iter()
        .map(|inst| max_nsw_allocation(inst, &[0, 1], &inst.all_goods(), &SearchBudget::default()).unwrap())
        .collect();
    c.bench_function("efx_2a/20 instances, 10 goods", |b| {
        b.iter(|| {
            for (inst, seed) in insts.iter().zip(&seeds) {
                black_box(efx_2a(inst, (0, 1), seed).unwrap());
            }
        })
    });
}

fn three_agents(c: &mut Criterion) {
    let mut group = c.benchmark_group("efx_3a");
    group.sample_size(10);
    for goods in [6, 8] {
        let insts = instances(3, goods, 10);
        group.bench_with_input(BenchmarkId::new("10 instances", goods), &goods, |b, _| {
            b.iter(|| {
                for inst in &insts {
                    black_box(efx_3a(inst, &AlphaParams::default(), &SearchBudget::default()).unwrap());
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, knapsack, nash_optimum, two_agents, three_agents);
criterion_main!(benches);
