use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use picheck_core::dyson::{dyson_terms_constant, dyson_terms_timedep, split};
use picheck_core::models::{snap_model, SnapSpec};
use picheck_core::numerics::random::{random_hermitian, seeded};
use picheck_core::numerics::{eig, expm};

fn kernels(c: &mut Criterion) {
    let mut rng = seeded(1);
    let h64 = random_hermitian(64, &mut rng);
    c.bench_function("expm_64", |b| b.iter(|| expm(black_box(&h64), Complex64::new(0.0, -1.0)).unwrap()));
    let h16 = random_hermitian(16, &mut rng);
    c.bench_function("eig_16", |b| b.iter(|| eig(black_box(&h16)).unwrap()));

    let mut spec = SnapSpec::default_for(4, 2);
    let sm = snap_model(&spec).unwrap();
    let sp = split(&sm.model);
    let cols: Vec<usize> = vec![0, 1, 8, 9];
    c.bench_function("snap_hierarchy_2000", |b| {
        b.iter(|| dyson_terms_timedep(&sp, sm.gate_time, 6, 2000, Some(&cols)).unwrap())
    });

    spec.relaxation = vec![0.0; 3];
    let sp = split(&snap_model(&spec).unwrap().model);
    c.bench_function("snap_block_exponential", |b| {
        b.iter(|| dyson_terms_constant(&sp, black_box(1.2), 6).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = kernels
}
criterion_main!(benches);
