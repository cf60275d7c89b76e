use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use normloop::benchmark::{bundled_datasets, dataset, inject_anomalies, run_trials, TrialPlan};
use normloop::ddl::{emit_ddl, parse_ddl};
use normloop::fd::{candidate_keys, closure, synthesize_3nf};
use normloop::normalize::DeterministicGenerator;
use normloop::verify::{verify_deterministic, DeterministicVerifier};
use normloop::{AttributeSet, NormalForm};
use normloop_bench::chain;

fn bench_closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("closure");
    for n in [6, 12, 16] {
        let (table, fds) = chain(n);
        let start: AttributeSet = table.columns[..1].iter().map(|c| c.name.clone()).collect();
        group.bench_with_input(BenchmarkId::new("chain", n), &n, |b, _| b.iter(|| closure(black_box(&start), &fds)));
        group.bench_with_input(BenchmarkId::new("keys", n), &n, |b, _| {
            b.iter(|| candidate_keys(&table, black_box(&fds)).unwrap())
        });
    }
    group.finish();
}

fn bench_synthesis(c: &mut Criterion) {
    let (table, fds) = chain(12);
    c.bench_function("synthesize_3nf/chain12", |b| b.iter(|| synthesize_3nf(black_box(&table), &fds).unwrap()));
}

fn bench_verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    for d in bundled_datasets() {
        let dirty = inject_anomalies(&d.schema, NormalForm::Nf3, 5, 1).unwrap().mutated_schema;
        group.bench_function(d.name, |b| b.iter(|| verify_deterministic(black_box(&dirty), NormalForm::Nf3).unwrap()));
    }
    group.finish();
}

fn bench_ddl(c: &mut Criterion) {
    let airport = dataset("airportdb").unwrap().schema;
    let text = emit_ddl(&airport).unwrap();
    c.bench_function("ddl/parse_airportdb", |b| b.iter(|| parse_ddl(black_box(&text)).unwrap()));
    c.bench_function("ddl/emit_airportdb", |b| b.iter(|| emit_ddl(black_box(&airport)).unwrap()));
}

fn bench_trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("trials");
    group.sample_size(10);
    for d in bundled_datasets() {
        let mut plan = TrialPlan::new(d.name, d.schema.clone(), NormalForm::Nf3, 9);
        plan.workers = Some(1);
        group.bench_function(d.name, |b| {
            b.iter(|| run_trials(&plan, &DeterministicGenerator, &DeterministicVerifier).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_closure, bench_synthesis, bench_verify, bench_ddl, bench_trials);
criterion_main!(benches);
