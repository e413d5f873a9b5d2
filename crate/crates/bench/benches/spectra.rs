use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use speclab_core::{
    build_t, build_u, eig_hermitian, eig_unitary, spectral_mapping_check, Boundary, CoinField, CoinSite, ShiftParams,
    Window,
};

fn spectra(c: &mut Criterion) {
    let shift = ShiftParams::from_p(0.3).unwrap();
    let coins = CoinField::constant(CoinSite::sigma1());

    let mut group = c.benchmark_group("eig_hermitian");
    for n in [64usize, 200] {
        let t = build_t(&shift, &coins, Window::with_len(0, n).unwrap(), Boundary::Dirichlet);
        group.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| b.iter(|| eig_hermitian(t)));
    }
    group.finish();

    let mut group = c.benchmark_group("eig_unitary");
    group.sample_size(20);
    for n in [16usize, 64] {
        let u = build_u(&shift, &coins, Window::with_len(0, n).unwrap(), Boundary::Periodic).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &u, |b, u| b.iter(|| eig_unitary(u)));
    }
    group.finish();

    c.bench_function("spectral mapping check, 64 sites", |b| {
        b.iter(|| spectral_mapping_check(&shift, &coins, 64))
    });
}

criterion_group!(benches, spectra);
criterion_main!(benches);
