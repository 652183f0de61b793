use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use herald_core::{
    g2_click, prepare_final_state, preset, solve_bands, FockCutoff, Generator, OracleOperator, SourceParams,
    SqueezeSpec,
};
use std::hint::black_box;

fn final_state(c: &mut Criterion) {
    let mut group = c.benchmark_group("prepare_final_state");
    for &(r, alpha) in &[(0.883, 0.06), (1.5, 0.06), (1.5, 1.5)] {
        let sq = SqueezeSpec::imaginary(r).unwrap();
        let cutoff = FockCutoff::for_squeezing(r);
        group.bench_with_input(BenchmarkId::from_parameter(format!("r={r},alpha={alpha}")), &(), |b, _| {
            b.iter(|| prepare_final_state(black_box(alpha), &sq, &cutoff).unwrap())
        });
    }
    group.finish();
}

fn click_g2(c: &mut Criterion) {
    let p = SourceParams::new(0.06, 1.5, 0.84).unwrap();
    c.bench_function("g2_click r=1.5 eta=0.84", |b| b.iter(|| g2_click(black_box(&p)).unwrap()));
}

fn bands(c: &mut Criterion) {
    let spec = preset("paper").unwrap().crystal;
    let mut group = c.benchmark_group("solve_bands");
    group.sample_size(10);
    group.bench_function("paper, 65 k x 8 bands", |b| b.iter(|| solve_bands(black_box(&spec), 65, 8).unwrap()));
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let g = Generator::SqueezeAB(SqueezeSpec::imaginary(0.883).unwrap());
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("two-mode squeeze, n_max = 40", |b| b.iter(|| OracleOperator::exponentiate(black_box(&g), 40)));
    group.finish();
}

criterion_group!(benches, final_state, click_g2, bands, oracle);
criterion_main!(benches);
