use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use torfan_bench::{bundle_over_projective, exceptional_family};
use torfan_core::catalog;
use torfan_core::perturbation::{default_ray, eigenprojection, pole_exponents};
use torfan_core::quantum_algebra::{qh_presentation, sh_classes, sh_presentation, PresentationMode};
use torfan_core::superpotential::{build_superpotential, critical_points_in, jacobian_ring};
use torfan_core::{BigRational, Complex64};

fn presentations(c: &mut Criterion) {
    let (f, p) = catalog::projective_space(4);
    c.bench_function("qh P4", |b| {
        b.iter(|| qh_presentation(black_box(&f), &p, PresentationMode::Compact).unwrap())
    });
    let (e, pe) = bundle_over_projective(4, 2);
    c.bench_function("qh+sh O(-2) over P4", |b| {
        b.iter(|| {
            let (pres, qh) = qh_presentation(black_box(&e), &pe, PresentationMode::Nlb).unwrap();
            sh_presentation(&qh, &sh_classes(&pres)).unwrap()
        })
    });
}

fn critical_points(c: &mut Criterion) {
    let (_, p) = catalog::p1_times_p1();
    let w = build_superpotential(&p, None).unwrap();
    let one = BigRational::from_integer(1.into());
    c.bench_function("jacobian ring P1xP1", |b| b.iter(|| jacobian_ring(black_box(&w), &one).unwrap()));
    let jac = jacobian_ring(&w, &one).unwrap();
    c.bench_function("critical points P1xP1", |b| {
        b.iter(|| critical_points_in(black_box(&w), &jac, 0).unwrap())
    });
}

fn projectors(c: &mut Criterion) {
    let fam = exceptional_family();
    let a = fam.eval_real(0.01);
    c.bench_function("eigenprojection 2x2", |b| {
        b.iter(|| eigenprojection(black_box(&a), Complex64::new(0.01, 0.0), 0.005).unwrap())
    });
    let ray = default_ray();
    c.bench_function("pole exponents 2x2", |b| b.iter(|| pole_exponents(black_box(&fam), &ray).unwrap()));
}

criterion_group!(benches, presentations, critical_points, projectors);
criterion_main!(benches);
