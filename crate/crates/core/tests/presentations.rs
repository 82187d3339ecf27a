//! Ideal-level comparisons of computed presentations with hand-derived ones.

use num_traits::One;
use torfan_core::bundle_blowup::{blowup_point_monotone, nlb_from_k};
use torfan_core::catalog;
use torfan_core::exact_algebra::{char_min_poly, rat};
use torfan_core::polytope::vertices;
use torfan_core::quantum_algebra::{
    c1_operator, char_poly_transfer_check, classical_dimension, eigen_family_check,
    eigenvalue_transfer_check, omega_operator, phi_check, qh_presentation, sh_classes,
    sh_presentation, PhiMap, Presentation, PresentationMode,
};
use torfan_core::{groebner_basis, BigRational, Monomial, Polynomial, UniPoly};

/// `c · x_i^a · T^b` in the symbolic ring.
fn term(p: &Presentation, c: i64, x: usize, a: u32, b: u32) -> Polynomial {
    let mut e = vec![0u32; p.ring.nvars()];
    e[x] = a;
    e[p.t_index()] = b;
    Polynomial::monomial(&p.ring, Monomial(e), rat(c))
}

fn same_ideal(p: &Presentation, extra: Vec<Polynomial>) {
    let mut gens = p.linear_relations.clone();
    gens.extend(extra);
    let expected = groebner_basis(&p.ring, &gens).unwrap();
    assert_eq!(p.symbolic_basis().unwrap(), expected);
}

#[test]
fn projective_plane_is_cube_root_of_t() {
    let (f, poly) = catalog::projective_space(2);
    let (p, a) = qh_presentation(&f, &poly, PresentationMode::Compact).unwrap();
    same_ideal(&p, vec![&term(&p, 1, 0, 3, 0) - &term(&p, 1, 0, 0, 3)]);
    assert_eq!(a.dimension(), 3);
}

#[test]
fn projective_spaces_up_to_four() {
    for m in 1..=4usize {
        let (f, poly) = catalog::projective_space(m);
        let (p, a) = qh_presentation(&f, &poly, PresentationMode::Compact).unwrap();
        assert_eq!(p.lambda_x, m as u64 + 1);
        let d = m as u32 + 1;
        same_ideal(&p, vec![&term(&p, 1, 0, d, 0) - &term(&p, 1, 0, 0, d)]);
        assert_eq!(a.dimension(), m + 1);
        assert_eq!(classical_dimension(&p).unwrap(), m + 1);
    }
}

#[test]
fn product_of_lines() {
    let (f, poly) = catalog::p1_times_p1();
    let (p, a) = qh_presentation(&f, &poly, PresentationMode::Compact).unwrap();
    same_ideal(
        &p,
        vec![
            &term(&p, 1, 0, 2, 0) - &term(&p, 1, 0, 0, 2),
            &term(&p, 1, 1, 2, 0) - &term(&p, 1, 1, 0, 2),
        ],
    );
    let shown: Vec<String> = p.qsr_relations.iter().map(|r| p.display(r)).collect();
    assert!(shown.contains(&"x1*x3 - t".to_string()));
    let (chi, min) = char_min_poly(&omega_operator(&a, &p).unwrap()).unwrap();
    assert_eq!(chi, UniPoly::from_i64(&[0, 0, -4, 0, 1]));
    assert_eq!(min, UniPoly::from_i64(&[0, -4, 0, 1]));
}

/// `x^{1+m} − T^{1+m−k} (−k x)^k` with `x = x₁`.
#[test]
fn bundles_over_projective_spaces() {
    for m in 1..=4usize {
        for k in 1..=m as u64 {
            let (b, pb) = catalog::projective_space(m);
            let (e, pe, spec) = nlb_from_k(&b, &pb, k).unwrap();
            assert_eq!(spec.n.last(), Some(&-(k as i64)));
            let (p, qh) = qh_presentation(&e, &pe, PresentationMode::Nlb).unwrap();
            let lead = term(&p, 1, 0, m as u32 + 1, 0);
            let coeff = (-(k as i64)).pow(k as u32);
            let tail = term(&p, coeff, 0, k as u32, (1 + m as u64 - k) as u32);
            same_ideal(&p, vec![&lead - &tail]);
            assert_eq!(qh.dimension(), m + 1);
            let sh = sh_presentation(&qh, &sh_classes(&p)).unwrap();
            assert_eq!(sh.dimension(), m + 1 - k as usize);
        }
    }
}

#[test]
fn conifold_like_bundle_polynomials() {
    let (b, pb) = catalog::p1_times_p1();
    let (e, pe, _) = nlb_from_k(&b, &pb, 1).unwrap();
    let (p, qh) = qh_presentation(&e, &pe, PresentationMode::Nlb).unwrap();
    let (chi, min) = char_min_poly(&omega_operator(&qh, &p).unwrap()).unwrap();
    assert_eq!(chi, UniPoly::from_i64(&[0, 0, 0, 4, 1]));
    assert_eq!(min, UniPoly::from_i64(&[0, 0, 4, 1]));
    let sh = sh_presentation(&qh, &sh_classes(&p)).unwrap();
    assert_eq!(sh.dimension(), 1);
    let w = omega_operator(&sh, &p).unwrap();
    assert_eq!(w.get(0, 0), &rat(-4));
}

/// Blowing up the origin of `ℂⁿ⁺¹` gives `x^{n+1} + Tⁿ x` in `x = x₁ = −x₀`.
#[test]
fn blowup_of_affine_space() {
    for n in 1..=4usize {
        let (f, poly) = catalog::affine_space(n + 1);
        let s = blowup_point_monotone(&f, &poly, 0).unwrap();
        let (p, a) = qh_presentation(&s.fan, &s.polytope, PresentationMode::Blowup).unwrap();
        assert_eq!(p.ring.names()[n + 1], "x0");
        let rel = &term(&p, 1, 0, n as u32 + 1, 0) + &term(&p, 1, 0, 1, n as u32);
        same_ideal(&p, vec![rel]);
        assert_eq!(a.dimension(), n + 1);
    }
}

#[test]
fn blowup_of_plane_chops_a_vertex() {
    let (f, poly) = catalog::projective_space_reflexive(2);
    assert_eq!(vertices(&poly).unwrap().len(), 3);
    let s = blowup_point_monotone(&f, &poly, 0).unwrap();
    assert_eq!(vertices(&s.polytope).unwrap().len(), 4);
    let (p, a) = qh_presentation(&s.fan, &s.polytope, PresentationMode::Blowup).unwrap();
    // one more fixed point
    assert_eq!(a.dimension(), 4);
    assert_eq!(s.fan.max_cones().len(), 4);
    assert_eq!(classical_dimension(&p).unwrap(), 4);
}

fn shipped_pairs() -> Vec<(&'static str, torfan_core::Fan, torfan_core::MomentPolytope, u64)> {
    let mut out = Vec::new();
    for m in 1..=4usize {
        for k in 1..=m as u64 {
            let (b, pb) = catalog::projective_space(m);
            out.push(("projective", b, pb, k));
        }
    }
    let (b, pb) = catalog::p1_times_p1();
    out.push(("product", b, pb, 1));
    out
}

#[test]
fn transfer_from_base_to_bundle() {
    for (_, b, pb, k) in shipped_pairs() {
        let (pres_b, qh_b) = qh_presentation(&b, &pb, PresentationMode::Compact).unwrap();
        let (e, pe, spec) = nlb_from_k(&b, &pb, k).unwrap();
        let (pres_e, qh_e) = qh_presentation(&e, &pe, PresentationMode::Nlb).unwrap();
        let sh_e = sh_presentation(&qh_e, &sh_classes(&pres_e)).unwrap();
        let phi = PhiMap::new(&pres_e, k, &spec.n);
        assert!(phi_check(&pres_b, &pres_e, &phi).unwrap());
        let omega_b = omega_operator(&qh_b, &pres_b).unwrap();
        let chi_b = char_min_poly(&omega_b).unwrap().0;
        assert!(char_poly_transfer_check(&pres_b, &pres_e, &phi, &chi_b).unwrap());
        let rep = eigenvalue_transfer_check(&omega_b, &qh_e, &sh_e, &pres_e, k, pres_b.lambda_x).unwrap();
        assert!(rep.worst_residual <= 1e-8);
        assert_eq!(rep.dim_qh_e, rep.dim_sh_e + rep.dim_nilpotent);
    }
}

#[test]
fn family_pattern_on_monotone_examples() {
    let mut cases = Vec::new();
    for m in 1..=4usize {
        cases.push(catalog::projective_space(m));
    }
    cases.push(catalog::p1_times_p1());
    for (f, poly) in cases.clone() {
        let (p, a) = qh_presentation(&f, &poly, PresentationMode::Compact).unwrap();
        let chi = char_min_poly(&c1_operator(&a, &p).unwrap()).unwrap().0;
        assert!(eigen_family_check(&chi, p.lambda_x).holds);
        for k in 1..p.lambda_x {
            let (e, pe, _) = nlb_from_k(&f, &poly, k).unwrap();
            let (pe_pres, qh) = qh_presentation(&e, &pe, PresentationMode::Nlb).unwrap();
            let chi = char_min_poly(&omega_operator(&qh, &pe_pres).unwrap()).unwrap().0;
            assert!(eigen_family_check(&chi, pe_pres.lambda_x).holds);
            assert_eq!(pe_pres.lambda_x, p.lambda_x - k);
        }
    }
}

#[test]
fn specialising_t_to_one_matches_unit_t() {
    let (f, poly) = catalog::projective_space(2);
    let (p, a) = qh_presentation(&f, &poly, PresentationMode::Compact).unwrap();
    let gens = p.specialized_generators(&BigRational::one());
    assert_eq!(a.groebner(), &groebner_basis(&p.x_ring, &gens).unwrap());
}
