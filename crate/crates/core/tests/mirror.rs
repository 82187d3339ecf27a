//! Superpotential side: Jacobian rings, critical points, barycentres and the
//! positive critical point, compared with the quantum side.

use std::f64::consts::PI;

use num_traits::{One, Zero};
use torfan_core::bundle_blowup::nlb_from_k;
use torfan_core::catalog;
use torfan_core::exact_algebra::numeric::eigenvalues;
use torfan_core::exact_algebra::{quotient_algebra, ratio};
use torfan_core::polytope::barycentre;
use torfan_core::quantum_algebra::{qh_presentation, sh_classes, sh_presentation, PresentationMode};
use torfan_core::superpotential::{
    barycentre_landing_check, build_superpotential, critical_points_in, family_closure_check,
    galkin_point, jacobian_ring, mirror_check, perturb_and_separate,
};
use torfan_core::{groebner_basis, BigRational, Complex64, Error, Monomial, Polynomial};

fn one() -> BigRational {
    BigRational::one()
}

/// Multiset equality up to `tol`, by greedy nearest matching.
fn assert_matched(a: Vec<Complex64>, mut b: Vec<Complex64>, tol: f64) {
    assert_eq!(a.len(), b.len());
    for x in a {
        let (i, d) = b
            .iter()
            .map(|y| (x - y).norm())
            .enumerate()
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        assert!(d <= tol, "{x} unmatched, nearest at {d:e}");
        b.swap_remove(i);
    }
}

#[test]
fn compact_examples_match_jacobian_rings() {
    let mut cases = vec![catalog::p1_times_p1()];
    for m in 1..=4 {
        cases.push(catalog::projective_space(m));
    }
    for (f, p) in cases {
        let (pres, qh) = qh_presentation(&f, &p, PresentationMode::Compact).unwrap();
        let w = build_superpotential(&p, None).unwrap();
        let j = jacobian_ring(&w, &one()).unwrap();
        let rep = mirror_check(&pres, &qh, &w, &j).unwrap();
        rep.ensure().unwrap();
        assert_eq!(j.dimension(), qh.dimension());
    }
}

#[test]
fn bundle_examples_match_localisations() {
    let mut cases = vec![(catalog::p1_times_p1(), 1)];
    for m in 1..=4usize {
        for k in 1..=m as u64 {
            cases.push((catalog::projective_space(m), k));
        }
    }
    for ((b, pb), k) in cases {
        let (e, pe, _) = nlb_from_k(&b, &pb, k).unwrap();
        let (pres, qh) = qh_presentation(&e, &pe, PresentationMode::Nlb).unwrap();
        let sh = sh_presentation(&qh, &sh_classes(&pres)).unwrap();
        let w = build_superpotential(&pe, None).unwrap();
        let j = jacobian_ring(&w, &one()).unwrap();
        mirror_check(&pres, &sh, &w, &j).unwrap().ensure().unwrap();
    }
}

/// Points `(w, …, w, −kw)` with `w^{1+m−k} = (−k)^k` and value `(1+m−k)w`.
#[test]
fn bundle_critical_points_closed_form() {
    for m in 1..=4usize {
        for k in 1..=m as u64 {
            let (b, pb) = catalog::projective_space(m);
            let (_, pe, _) = nlb_from_k(&b, &pb, k).unwrap();
            let w = build_superpotential(&pe, None).unwrap();
            let j = jacobian_ring(&w, &one()).unwrap();
            let crit = critical_points_in(&w, &j, 0).unwrap();
            let le = 1 + m - k as usize;
            assert_eq!(crit.points.len(), le);
            let base = Complex64::new((-(k as f64)).powi(k as i32), 0.0);
            let r = base.norm().powf(1.0 / le as f64);
            let th = base.arg() / le as f64;
            let mut expected: Vec<Complex64> = (0..le)
                .map(|q| Complex64::from_polar(r, th + 2.0 * PI * q as f64 / le as f64))
                .collect();
            for pt in &crit.points {
                let wv = pt.coords[0];
                let pos = expected
                    .iter()
                    .position(|e| (e - wv).norm() <= 1e-8)
                    .expect("w is a root");
                expected.remove(pos);
                for c in &pt.coords[..m] {
                    assert!((c - wv).norm() <= 1e-8);
                }
                assert!((pt.coords[m] + wv * k as f64).norm() <= 1e-8);
                assert!((pt.value - wv * le as f64).norm() <= 1e-8);
                assert!(pt.nondegenerate);
            }
            assert!(family_closure_check(&crit.values(), le as u64));
        }
    }
}

#[test]
fn values_agree_with_w_matrix_and_finite_differences() {
    let (_, p) = catalog::p1_times_p1();
    let (b, pb) = catalog::projective_space(3);
    let (_, pe, _) = nlb_from_k(&b, &pb, 1).unwrap();
    for poly in [p, catalog::projective_space(2).1, pe] {
        let w = build_superpotential(&poly, None).unwrap();
        let j = jacobian_ring(&w, &one()).unwrap();
        let crit = critical_points_in(&w, &j, 2).unwrap();
        assert_matched(crit.values(), eigenvalues(&j.w_matrix.to_complex()).unwrap(), 1e-8);
        for pt in &crit.points {
            assert!(pt.gradient_norm <= 1e-9);
            let grad = w.gradient(&one(), &pt.coords).unwrap();
            for a in 0..pt.coords.len() {
                let h = 1e-6 * pt.coords[a].norm().max(1.0);
                let mut zp = pt.coords.clone();
                let mut zm = pt.coords.clone();
                zp[a] += h;
                zm[a] -= h;
                let fd = (w.evaluate(&one(), &zp).unwrap() - w.evaluate(&one(), &zm).unwrap()) / (2.0 * h);
                let scale = pt.value.norm().max(1.0);
                assert!((fd - grad[a]).norm() <= 1e-6 * scale);
            }
        }
    }
}

/// Clearing denominators by `z₁⋯zₙ` instead of the extra variable, then
/// saturating, gives the same dimension.
#[test]
fn saturation_variable_matches_cleared_denominators() {
    let (_, p) = catalog::projective_space(2);
    let w = build_superpotential(&p, None).unwrap();
    let j = jacobian_ring(&w, &one()).unwrap();
    let ring = j.ring().clone();
    // z₁∂₁W·z₁z₂ = z₁²z₂ − 1 and z₂∂₂W·z₁z₂ = z₁z₂² − 1, no u needed
    let mono = |a: u32, b: u32| Polynomial::monomial(&ring, Monomial(vec![a, b, 0]), BigRational::one());
    let g1 = &mono(2, 1) - &ring.one();
    let g2 = &mono(1, 2) - &ring.one();
    let u = ring.var(2);
    let sat = &(&u * &mono(1, 1)) - &ring.one();
    let a = quotient_algebra(&groebner_basis(&ring, &[g1, g2, sat]).unwrap()).unwrap();
    assert_eq!(a.dimension(), j.dimension());
}

#[test]
fn barycentres() {
    for m in 1..=3 {
        let (_, r) = catalog::projective_space_reflexive(m);
        let y = barycentre(&r, 1).unwrap();
        assert!(y.iter().all(|v| v.is_zero()));
        assert!(barycentre_landing_check(&r, 1).unwrap().holds);
    }
    let (_, p) = catalog::projective_space(2);
    assert_eq!(barycentre(&p, 3).unwrap(), vec![ratio(1, 3), ratio(1, 3)]);
    for m in 1..=3usize {
        for k in 1..=m as u64 {
            let (b, pb) = catalog::projective_space(m);
            let (_, pe, spec) = nlb_from_k(&b, &pb, k).unwrap();
            let le = spec.lambda_e.unwrap() as u64;
            let rep = barycentre_landing_check(&pe, le).unwrap();
            assert!(rep.holds);
            assert_eq!(rep.barycentre[m], ratio(1, le as i64));
        }
    }
}

#[test]
fn positive_critical_points() {
    let cases = [
        (catalog::projective_space_fan(2), 3.0),
        (catalog::p1_times_p1_fan(), 4.0),
        (catalog::projective_space_fan(3), 4.0),
    ];
    for (fan, value) in cases {
        let start = std::time::Instant::now();
        let g = galkin_point(&fan).unwrap();
        assert!(start.elapsed().as_secs_f64() < 1.0);
        assert!(g.gradient_norm <= 1e-10);
        assert!(g.hessian_min_eigenvalue > 0.0);
        assert!(g.z.iter().all(|&z| z > 0.0));
        assert!((g.value - value).abs() < 1e-10);
    }
    for (b, pb, k) in [
        (catalog::projective_space(1).0, catalog::projective_space(1).1, 1),
        (catalog::p1_times_p1().0, catalog::p1_times_p1().1, 1),
        (catalog::projective_space(2).0, catalog::projective_space(2).1, 2),
    ] {
        let (e, _, _) = nlb_from_k(&b, &pb, k).unwrap();
        assert!(matches!(galkin_point(&e), Err(Error::HalfSpaceFan(_))));
    }
}

#[test]
fn generic_twists_separate_values() {
    let (b, pb) = catalog::p1_times_p1();
    let (_, pe, _) = nlb_from_k(&b, &pb, 1).unwrap();
    for seed in 0..10 {
        let rep = perturb_and_separate(&pb, seed, 1e-2).unwrap();
        rep.ensure().unwrap();
        let rep = perturb_and_separate(&pe, seed, 1e-2).unwrap();
        rep.ensure().unwrap();
        assert!(rep.jac_dim > 1);
    }
}
