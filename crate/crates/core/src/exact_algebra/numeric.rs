//! Double-precision complex linear algebra: Schur form by shifted QR,
//! eigenpairs, polynomial roots, and thin wrappers over nalgebra's SVD.

use nalgebra::{ComplexField, DMatrix, Dyn, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

const EPS: f64 = f64::EPSILON;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Unitary `G = [[c, s], [-conj(s), c]]` with real `c`, chosen so that `G·(a, b)ᵀ = (r, 0)ᵀ`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nrm = na.hypot(b.norm());
    if nrm == 0.0 {
        return (1.0, c(0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / b.norm());
    }
    (na / nrm, (a / na) * b.conj() / nrm)
}

fn rotate_rows(h: &mut ComplexMatrix, k: usize, cs: f64, sn: Complex64, cols: std::ops::Range<usize>) {
    for j in cols {
        let (h1, h2) = (h[(k, j)], h[(k + 1, j)]);
        h[(k, j)] = h1 * cs + sn * h2;
        h[(k + 1, j)] = -sn.conj() * h1 + h2 * cs;
    }
}

fn rotate_cols(h: &mut ComplexMatrix, k: usize, cs: f64, sn: Complex64, rows: std::ops::Range<usize>) {
    for i in rows {
        let (h1, h2) = (h[(i, k)], h[(i, k + 1)]);
        h[(i, k)] = h1 * cs + h2 * sn.conj();
        h[(i, k + 1)] = -h1 * sn + h2 * cs;
    }
}

/// Unitary reduction to upper Hessenberg form: returns `(H, Q)` with `M = Q H Qᴴ`.
pub fn hessenberg(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = m.nrows();
    let mut h = m.clone();
    let mut q = ComplexMatrix::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if alpha <= EPS * h.norm() {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { c(1.0) };
        let mut v = x.clone();
        v[0] += phase * alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H <- (I - 2vvᴴ) H on rows k+1..
        for j in 0..n {
            let dot: Complex64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= v[i] * dot * 2.0;
            }
        }
        // H <- H (I - 2vvᴴ) on columns k+1..
        for i in 0..n {
            let dot: Complex64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= dot * v[j].conj() * 2.0;
            }
        }
        for i in 0..n {
            let dot: Complex64 = (0..v.len()).map(|j| q[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                q[(i, k + 1 + j)] -= dot * v[j].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = c(0.0);
        }
    }
    (h, q)
}

/// Complex Schur decomposition `M = Z T Zᴴ` with `T` upper triangular.
pub fn complex_schur(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    let (mut h, mut z) = hessenberg(m);
    if n < 2 {
        return Ok((h, z));
    }
    let scale = h.norm().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // locate the active window lo..=hi
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { scale } else { s };
            if h[(lo, lo - 1)].norm() <= EPS * s {
                h[(lo, lo - 1)] = c(0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return Err(Error::NonConvergence(format!(
                "shifted QR did not converge after {total} sweeps"
            )));
        }
        let mu = if iter.is_multiple_of(10) {
            h[(hi, hi)] + c(0.75 * h[(hi, hi - 1)].norm())
        } else {
            let (a, b, cc, d) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
            let tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * cc).sqrt();
            let (l1, l2) = (tr + disc, tr - disc);
            if (l1 - d).norm() < (l2 - d).norm() { l1 } else { l2 }
        };
        // implicit single-shift sweep on lo..=hi
        let (cs, sn) = givens(h[(lo, lo)] - mu, h[(lo + 1, lo)]);
        rotate_rows(&mut h, lo, cs, sn, lo..n);
        rotate_cols(&mut h, lo, cs, sn, 0..(lo + 3).min(hi + 1));
        rotate_cols(&mut z, lo, cs, sn, 0..n);
        for k in lo + 1..hi {
            let (cs, sn) = givens(h[(k, k - 1)], h[(k + 1, k - 1)]);
            rotate_rows(&mut h, k, cs, sn, k - 1..n);
            h[(k + 1, k - 1)] = c(0.0);
            rotate_cols(&mut h, k, cs, sn, 0..(k + 3).min(hi + 1));
            rotate_cols(&mut z, k, cs, sn, 0..n);
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = c(0.0);
        }
    }
    Ok((h, z))
}

/// Eigenvalues and unit eigenvectors (columns), each with residual
/// `‖Mv − λv‖ ≤ 1e−10·‖M‖`.
pub fn complex_eigen(m: &ComplexMatrix) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    let (t, z) = complex_schur(m)?;
    let n = m.nrows();
    let tnorm = t.norm().max(f64::MIN_POSITIVE);
    let mut vecs = ComplexMatrix::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for k in 0..n {
        let lam = t[(k, k)];
        let mut y = vec![c(0.0); n];
        y[k] = c(1.0);
        for i in (0..k).rev() {
            let s: Complex64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut d = t[(i, i)] - lam;
            if d.norm() < EPS * tnorm {
                d = c(EPS * tnorm);
            }
            y[i] = -s / d;
        }
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| (0..=k).map(|j| z[(i, j)] * y[j]).sum())
            .collect();
        let vn = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= vn;
        }
        for i in 0..n {
            vecs[(i, k)] = v[i];
        }
        vals.push(lam);
    }
    let mnorm = m.norm();
    let resid = m * &vecs - &vecs * ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals.clone()));
    for k in 0..n {
        let r = resid.column(k).norm();
        if r > 1e-10 * mnorm.max(1e-300) && r > 1e-300 {
            return Err(Error::NonConvergence(format!(
                "eigenpair {k} has residual {r:.3e} against matrix norm {mnorm:.3e}"
            )));
        }
    }
    Ok((vals, vecs))
}

/// Eigenvalues only (diagonal of the Schur form).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let (t, _) = complex_schur(m)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Roots of `Σ cₖ xᵏ` (coefficients from the constant term up) by Aberth iteration.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut a: Vec<Complex64> = coeffs.to_vec();
    while a.last().is_some_and(|z| z.norm() == 0.0) {
        a.pop();
    }
    let mut roots = Vec::new();
    let zeros = a.iter().take_while(|z| z.norm() == 0.0).count();
    roots.extend(std::iter::repeat_n(c(0.0), zeros));
    let a: Vec<Complex64> = a[zeros..].to_vec();
    let n = a.len().saturating_sub(1);
    if n == 0 {
        return roots;
    }
    let lead = a[n];
    let radius = (0..n)
        .map(|k| (a[k] / lead).norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = c(0.0);
        let mut dp = c(0.0);
        for coef in a.iter().rev() {
            dp = dp * x + p;
            p = p * x + coef;
        }
        (p, dp)
    };
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = eval(z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| c(1.0) / (z[k] - z[j]))
                .sum();
            let w = ratio / (c(1.0) - ratio * sum);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / z[k].norm().max(1.0));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if step.is_finite() {
                *r -= step;
            }
        }
    }
    roots.extend(z);
    roots
}

/// Singular values in decreasing order.
/// nalgebra's default stopping threshold zeroes superdiagonal entries too early
/// on some rank-deficient inputs (recomposition errors near 1e-2 were seen on
/// exact rank-one projectors), so iterate to a tighter one first.
pub fn svd<T: ComplexField<RealField = f64>>(m: DMatrix<T>, u: bool, v: bool) -> SVD<T, Dyn, Dyn> {
    match m.clone().try_svd(u, v, 1e-17, 100_000) {
        Some(s) => s,
        None => m.svd(u, v),
    }
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = svd(m.clone(), false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numeric rank with relative threshold on singular values.
pub fn numeric_rank(m: &ComplexMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Orthonormal basis (columns) of the numeric nullspace.
pub fn nullspace(m: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    let n = m.ncols();
    if m.nrows() == 0 {
        return ComplexMatrix::identity(n, n);
    }
    // square up so the SVD returns a full right basis
    let padded = if m.nrows() < n {
        let mut p = ComplexMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd(padded, false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top == 0.0 || svd.singular_values[i] <= rel_tol * top)
        .collect();
    let mut out = ComplexMatrix::zeros(n, cols.len());
    for (k, &i) in cols.iter().enumerate() {
        for j in 0..n {
            out[(j, k)] = vt[(i, j)].conj();
        }
    }
    out
}

/// Orthonormal basis (columns) of the column space, by SVD with a relative cutoff.
pub fn orthonormal_range(m: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    if m.is_empty() {
        return ComplexMatrix::zeros(m.nrows(), 0);
    }
    let svd = svd(m.clone(), true, false);
    let u = svd.u.expect("requested left singular vectors");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top > 0.0 && svd.singular_values[i] > rel_tol * top)
        .collect();
    let mut out = ComplexMatrix::zeros(m.nrows(), cols.len());
    for (k, &i) in cols.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Sort key for deterministic output: modulus, then argument in `(−π, π]`.
pub fn spectral_order(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    let round = |x: f64| (x * 1e9).round();
    round(a.norm())
        .total_cmp(&round(b.norm()))
        .then_with(|| round(a.arg()).total_cmp(&round(b.arg())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows.len(), rows[0].len(), |i, j| c(rows[i][j]))
    }

    #[test]
    fn diagonal_eigenvalues() {
        let (vals, vecs) = complex_eigen(&mat(&[&[2.0, 0.0], &[0.0, 3.0]])).unwrap();
        let mut v: Vec<f64> = vals.iter().map(|z| z.re).collect();
        v.sort_by(f64::total_cmp);
        assert!((v[0] - 2.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
        assert_eq!(vecs.ncols(), 2);
    }

    #[test]
    fn cube_roots_of_unity() {
        let m = mat(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let (vals, _) = complex_eigen(&m).unwrap();
        assert_eq!(vals.len(), 3);
        for z in &vals {
            assert!((z.powu(3) - 1.0).norm() < 1e-10);
        }
        let s: Complex64 = vals.iter().sum();
        assert!(s.norm() < 1e-10);
    }

    #[test]
    fn schur_reconstructs() {
        let m = ComplexMatrix::from_fn(5, 5, |i, j| Complex64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64));
        let (t, z) = complex_schur(&m).unwrap();
        let back = &z * &t * z.adjoint();
        assert!((back - &m).norm() < 1e-12 * m.norm());
        let unit = z.adjoint() * &z - ComplexMatrix::identity(5, 5);
        assert!(unit.norm() < 1e-12);
        for j in 0..5 {
            for i in j + 1..5 {
                assert_eq!(t[(i, j)], c(0.0));
            }
        }
    }

    #[test]
    fn defective_block_has_small_residual() {
        let m = mat(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let (vals, _) = complex_eigen(&m).unwrap();
        assert!(vals.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn roots_of_polynomials() {
        // (x - 1)(x + 2)(x^2 + 1)
        let r = poly_roots(&[c(-2.0), c(1.0), c(-1.0), c(1.0), c(1.0)]);
        assert_eq!(r.len(), 4);
        for target in [c(1.0), c(-2.0), Complex64::i(), -Complex64::i()] {
            assert!(r.iter().any(|z| (z - target).norm() < 1e-12));
        }
        let z = poly_roots(&[c(0.0), c(0.0), c(1.0)]);
        assert_eq!(z, vec![c(0.0), c(0.0)]);
    }

    #[test]
    fn nullspace_and_rank() {
        let m = mat(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(numeric_rank(&m, 1e-10), 1);
        let ns = nullspace(&m, 1e-10);
        assert_eq!(ns.ncols(), 1);
        assert!((&m * &ns).norm() < 1e-14);
    }
}
