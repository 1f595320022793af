use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use operformal::coder::{ad_matrix, bracket, ComponentBasis};
use operformal::exactla::{kernel, rref};
use operformal::fixtures;
use operformal::ingest::{transfer_spec, Operad};
use operformal::kaledin::formalize;
use operformal::spectral::push_euler;
use operformal_bench::{random_matrix, random_tau};

fn linear_algebra(c: &mut Criterion) {
    let mut group = c.benchmark_group("exactla");
    for n in [20, 40, 80] {
        let m = random_matrix(n, n + 5, 0.2, n as u64);
        group.bench_with_input(BenchmarkId::new("rref", n), &m, |b, m| b.iter(|| rref(m)));
        group.bench_with_input(BenchmarkId::new("kernel", n), &m, |b, m| b.iter(|| kernel(m)));
    }
    group.finish();
}

fn coderivations(c: &mut Criterion) {
    let mut group = c.benchmark_group("coder");
    let q = fixtures::exterior_unital(5);
    let tau = random_tau(&q, 1);
    group.bench_function("bracket_w5", |b| b.iter(|| bracket(&tau, q.q()).unwrap()));
    let product = q.q_w(1);
    for w in [2, 3, 4] {
        let src = ComponentBasis::new(q.space().clone(), q.symmetry(), w, 0);
        let dst = ComponentBasis::new(q.space().clone(), q.symmetry(), w + 1, 1);
        group.bench_with_input(BenchmarkId::new("ad_matrix", w), &w, |b, _| {
            b.iter(|| ad_matrix(&product, &src, &dst).unwrap())
        });
    }
    group.finish();
}

fn formality(c: &mut Criterion) {
    let mut group = c.benchmark_group("formality");
    group.sample_size(20);
    let massey = fixtures::massey(4);
    group.bench_function("push_euler_massey", |b| b.iter(|| push_euler(&massey).unwrap()));
    let gauged = fixtures::gauge_corpus(Operad::Ass, 1, 6).unwrap().remove(0).gauged;
    group.bench_function("formalize_gauged_w5", |b| b.iter(|| formalize(&gauged).unwrap()));
    let dga = fixtures::massey_dga();
    group.bench_function("transfer_massey_w4", |b| b.iter(|| transfer_spec(&dga, 4).unwrap()));
    group.finish();
}

criterion_group!(benches, linear_algebra, coderivations, formality);
criterion_main!(benches);
