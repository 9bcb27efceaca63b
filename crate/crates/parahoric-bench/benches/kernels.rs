//! Timings for the hot kernels: Smith form over `Z/p^N`, affinoid inversion and the
//! overconvergent lift at level 11.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use parahoric::evalmaps::{hecke_classical, lift_noncritical, p_stabilize, unit_root};
use parahoric::family::TruncatedAffinoid;
use parahoric::padic::{smith, PadicNumber, ZMat, Zmod};

fn pseudo_random(z: &Zmod, n: usize, seed: u64) -> ZMat {
    let mut s = seed;
    let rows = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    z.from_i64((s >> 33) as i64)
                })
                .collect()
        })
        .collect();
    ZMat::from_rows(rows)
}

fn bench_smith(c: &mut Criterion) {
    let z = Zmod::new(7, 20).unwrap();
    let a = pseudo_random(&z, 40, 0x5eed);
    c.bench_function("smith 40x40 mod 7^20", |b| b.iter(|| smith(&z, black_box(&a), true)));
}

fn bench_affinoid(c: &mut Criterion) {
    let (p, degree, prec) = (3, 3, 20);
    let one = TruncatedAffinoid::one(p, degree, prec);
    let t1 = TruncatedAffinoid::variable(p, degree, 0, prec);
    let t2 = TruncatedAffinoid::variable(p, degree, 1, prec);
    let x = one.add(&t1.mul(&t2)).add(&t1.scale(&PadicNumber::from_i64(p, 3, prec)));
    c.bench_function("affinoid inverse D=3", |b| b.iter(|| black_box(&x).inv().unwrap()));
}

fn bench_lift(c: &mut Criterion) {
    let (level, p, m) = (11, 3, 6);
    let h = hecke_classical(level).unwrap();
    let form = h.rational_newforms().into_iter().next().unwrap();
    let alpha = unit_root(p, form.eigenvalues[&p], m as i64 + 6).unwrap();
    let stab = p_stabilize(&h.space.symbol(form.basis[0].clone()), p, &alpha).unwrap();
    let mut group = c.benchmark_group("lift");
    group.sample_size(10);
    group.bench_function("level 11, p = 3, M = 6", |b| {
        b.iter(|| lift_noncritical(black_box(&stab), &alpha, m, m as usize + 1).unwrap())
    });
    group.finish();
}

criterion_group!(kernels, bench_smith, bench_affinoid, bench_lift);
criterion_main!(kernels);
