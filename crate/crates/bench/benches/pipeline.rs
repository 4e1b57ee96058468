use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qspicb_bench::cases;
use qspicb_core::bar::{canonical_solve, psi_i_bar, TieBreak};
use qspicb_core::tensor::{build_module, levi_to_shape};
use qspicb_core::{
    compute, kl_oracle, Convention, CoxeterGroup, CoxeterType, HeckeAlgebra, QSPConfig, Upsilon,
};

fn involution(c: &mut Criterion) {
    let mut g = c.benchmark_group("psi_i");
    for case in cases() {
        let shape = levi_to_shape(&case.b_seq, &case.levi).unwrap();
        let module = build_module(&shape, &case.config).unwrap();
        g.bench_function(BenchmarkId::from_parameter(case.name), |b| {
            b.iter(|| psi_i_bar(&module).unwrap())
        });
    }
    g.finish();
}

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("canonical_solve");
    for case in cases() {
        let shape = levi_to_shape(&case.b_seq, &case.levi).unwrap();
        let module = build_module(&shape, &case.config).unwrap();
        let bar = psi_i_bar(&module).unwrap().bar;
        let lattice = case.config.lattice();
        g.bench_function(BenchmarkId::from_parameter(case.name), |b| {
            b.iter(|| canonical_solve(&bar, lattice, TieBreak::Smallest).unwrap())
        });
    }
    g.finish();
}

fn end_to_end(c: &mut Criterion) {
    let mut g = c.benchmark_group("compute");
    g.sample_size(10);
    for case in cases() {
        g.bench_function(BenchmarkId::from_parameter(case.name), |b| {
            b.iter(|| compute(&case.b_seq, &case.levi, &case.config).unwrap())
        });
    }
    g.finish();
}

fn upsilon(c: &mut Criterion) {
    let mut g = c.benchmark_group("upsilon");
    g.sample_size(10);
    for rank in [2, 4] {
        let cfg = QSPConfig {
            height_cap: 6,
            ..QSPConfig::new(rank, Convention::Part2)
        };
        g.bench_function(BenchmarkId::new("cap6", rank), |b| {
            b.iter(|| Upsilon::new(&cfg).unwrap().all_components().unwrap())
        });
    }
    g.finish();
}

fn hecke(c: &mut Criterion) {
    let mut g = c.benchmark_group("kl");
    g.sample_size(10);
    let h = HeckeAlgebra::new(Arc::new(CoxeterGroup::new(CoxeterType::B, 3).unwrap()));
    g.bench_function("parabolic_b3_levi_1", |b| {
        b.iter(|| h.parabolic_kl_matrix(&[1]).unwrap())
    });
    g.bench_function("oracle_b3_levi_1_n6", |b| {
        b.iter(|| kl_oracle(CoxeterType::B, 3, &[1], 6).unwrap())
    });
    g.finish();
}

criterion_group!(benches, involution, solver, end_to_end, upsilon, hecke);
criterion_main!(benches);
