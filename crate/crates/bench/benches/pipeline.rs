use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use tetcut_bench::{random_field, shell_field};
use tetcut_core::cutcell::npac::{NpacTable, SymmetryGroup};
use tetcut_core::diagnostics::watertight_check;
use tetcut_core::export::write_vtk;
use tetcut_core::{decompose, measure, resolve, Rule, RuleConfig};

fn bench_decompose(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    for n in [8, 16] {
        let random = random_field(n, 1);
        group.bench_with_input(BenchmarkId::new("random", n), &random, |b, f| b.iter(|| decompose(black_box(f))));
        let shell = shell_field(2 * n);
        group.bench_with_input(BenchmarkId::new("shell", 2 * n), &shell, |b, f| b.iter(|| decompose(black_box(f))));
    }
    group.finish();
}

fn bench_rules(c: &mut Criterion) {
    let field = random_field(12, 2);
    let mesh = decompose(&field).unwrap();
    let mut group = c.benchmark_group("resolve");
    for rule in [Rule::L1Solid, Rule::L3, Rule::L4Max, Rule::G1Solid, Rule::G2Max] {
        group.bench_function(rule.name(), |b| {
            b.iter_batched(
                || mesh.clone(),
                |mut m| resolve(&mut m, &field, &RuleConfig::new(rule), None).unwrap(),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn bench_diagnostics(c: &mut Criterion) {
    let field = random_field(12, 3);
    let mut mesh = decompose(&field).unwrap();
    resolve(&mut mesh, &field, &RuleConfig::new(Rule::L3), None).unwrap();
    c.bench_function("measure", |b| b.iter(|| measure(black_box(&mesh)).unwrap()));
    c.bench_function("watertight_check", |b| b.iter(|| watertight_check(black_box(&mesh)).unwrap()));
    c.bench_function("write_vtk", |b| b.iter(|| write_vtk(black_box(&mesh)).unwrap()));
}

fn bench_npac(c: &mut Criterion) {
    c.bench_function("npac_table/rot_refl48_complement", |b| {
        b.iter(|| NpacTable::build(black_box(SymmetryGroup::RotRefl48Complement)))
    });
}

criterion_group!(benches, bench_decompose, bench_rules, bench_diagnostics, bench_npac);
criterion_main!(benches);
