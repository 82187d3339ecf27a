//! Perturbation examples with independently known answers.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torfan_core::exact_algebra::numeric::eigenvalues;
use torfan_core::perturbation::{
    default_ray, derivative_spectrum, eigenprojection, gevec_convergence, log_log_slope,
    semisimple_convergence_check, subspace_distance, total_projection_limit_check, track_eigenvalues,
};
use torfan_core::{Complex64, ComplexMatrix, Error, MatrixFamily, Subspace};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn real(m: &DMatrix<f64>) -> ComplexMatrix {
    m.map(c)
}

fn column(v: &[f64]) -> Subspace {
    Subspace::span(&ComplexMatrix::from_iterator(v.len(), 1, v.iter().map(|&x| c(x))))
}

/// `S · (diag(0, 0, 1) + x · diag(1, 2, 0)) · S⁻¹`
fn conjugated_diagonal() -> (MatrixFamily, DMatrix<f64>) {
    let s = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 2.0]);
    let si = s.clone().try_inverse().unwrap();
    let a0 = &s * DMatrix::from_diagonal(&nalgebra::dvector![0.0, 0.0, 1.0]) * &si;
    let a1 = &s * DMatrix::from_diagonal(&nalgebra::dvector![1.0, 2.0, 0.0]) * &si;
    (MatrixFamily::linear(&real(&a0), &real(&a1)).unwrap(), s)
}

#[test]
fn conjugation_preserves_derivatives_and_lines() {
    let (fam, s) = conjugated_diagonal();
    let ray = default_ray();
    let mut d = derivative_spectrum(&fam, c(0.0), &ray).unwrap();
    d.sort_by(|a, b| a.re.total_cmp(&b.re));
    assert!((d[0] - 1.0).norm() < 1e-8 && (d[1] - 2.0).norm() < 1e-8);
    let rep = semisimple_convergence_check(&fam, c(0.0), &ray).unwrap();
    assert!(rep.bounded && rep.cauchy);
    for l in &rep.lines {
        let i = if l.derivative.re < 1.5 { 0 } else { 1 };
        let target = column(&[s[(0, i)], s[(1, i)], s[(2, i)]]);
        assert!(subspace_distance(&l.limit, &target).unwrap() < 1e-6);
    }
}

/// First-order degenerate perturbation: the derivatives at a semisimple
/// eigenvalue are the eigenvalues of `A₁` compressed to its eigenspace.
#[test]
fn derivatives_are_compressed_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let mut b = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
        b = &b + b.transpose();
        let a0 = DMatrix::from_diagonal(&nalgebra::dvector![0.0, 0.0, 0.0, 3.0]);
        let fam = MatrixFamily::linear(&real(&a0), &real(&b)).unwrap();
        let mut oracle: Vec<f64> = b.view((0, 0), (3, 3)).into_owned().symmetric_eigenvalues().iter().copied().collect();
        oracle.sort_by(f64::total_cmp);
        let mut got: Vec<f64> = derivative_spectrum(&fam, c(0.0), &default_ray())
            .unwrap()
            .iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-6);
                z.re
            })
            .collect();
        got.sort_by(f64::total_cmp);
        for (g, o) in got.iter().zip(&oracle) {
            assert!((g - o).abs() < 1e-6, "{g} vs {o}");
        }
    }
}

/// `[[0,1,0],[0,0,1],[x,0,0]]` splits into cube roots of `x`; each branch
/// projector blows up like `x^{-2/3}` while their sum stays the identity.
#[test]
fn cube_root_branching() {
    let fam = MatrixFamily::from_real(&[
        vec![vec![0.0], vec![1.0], vec![0.0]],
        vec![vec![0.0], vec![0.0], vec![1.0]],
        vec![vec![0.0, 1.0], vec![0.0], vec![0.0]],
    ])
    .unwrap();
    let ray = default_ray();
    let norms: Vec<f64> = ray
        .iter()
        .map(|&x| {
            let r = x.cbrt();
            let p = eigenprojection(&fam.eval_real(x), c(r), r / 2.0).unwrap();
            assert!(p.idempotency_defect < 1e-6);
            p.norm()
        })
        .collect();
    assert!((log_log_slope(&ray, &norms) + 2.0 / 3.0).abs() < 0.05);
    let rep = total_projection_limit_check(&fam, c(0.0), &ray).unwrap();
    assert_eq!(rep.multiplicity, 3);
    assert!(rep.bounded && rep.converged);
    assert!(matches!(derivative_spectrum(&fam, c(0.0), &ray), Err(Error::NotSemisimple(_))));
    for p in track_eigenvalues(&fam, &ray).unwrap() {
        for (x, mu) in &p.samples {
            assert!((mu.norm() - x.re.cbrt()).abs() < 1e-8);
        }
    }
}

#[test]
fn total_projection_of_simple_eigenvalue() {
    let (fam, _) = conjugated_diagonal();
    let ray = default_ray();
    let rep = total_projection_limit_check(&fam, c(1.0), &ray).unwrap();
    assert_eq!(rep.multiplicity, 1);
    assert!(rep.bounded && rep.converged);
    // the eigenvalue 1 does not move, so P is constant
    assert!(rep.errors.iter().all(|&e| e < 1e-8));
    assert!(matches!(
        total_projection_limit_check(&fam, c(5.0), &ray),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn gevecs_of_conjugated_family() {
    let (fam, _) = conjugated_diagonal();
    let rep = gevec_convergence(&fam, &default_ray()).unwrap();
    assert_eq!(rep.clusters.iter().map(|c| c.members.len()).sum::<usize>(), 3);
    for cl in &rep.clusters {
        assert!(cl.monotone);
        assert!(*cl.distances.last().unwrap() < 1e-3);
    }
    let x = *default_ray().last().unwrap();
    let ev = eigenvalues(&fam.eval_real(x)).unwrap();
    assert_eq!(ev.len(), 3);
}

