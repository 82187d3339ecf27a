//! Eigenvalues, eigenprojections and (generalised) eigenspaces of holomorphic
//! matrix families `A(x)` as `x → 0` along the positive real axis.
//!
//! Projectors are resolvent contour integrals by the trapezoid rule. Data of
//! `A(0)` (multiplicities, semisimplicity, generalised eigenprojections) is
//! exact whenever `A(0)` and the eigenvalue are rational, otherwise it uses a
//! numeric rank with relative threshold `1e−8`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact_algebra::numeric::{eigenvalues, nullspace, orthonormal_range, singular_values, svd};
use crate::exact_algebra::poly::{approximate_rational, to_f64};
use crate::exact_algebra::{exact_spectrum, spectral_order, ComplexMatrix, RationalMatrix};

pub const CONTOUR_NODES: usize = 256;

/// Largest denominator at which float input is read as an exact rational.
pub const EXACT_DENOMINATOR: i64 = 10_000;
const RANK_TOL: f64 = 1e-8;
const ROUNDING_FLOOR: f64 = 1e-8;

/// `x₀ ρᵏ` with `x₀ = 0.1`, `ρ = 1/2`, `k = 0, …, 19`.
pub fn default_ray() -> Vec<f64> {
    (0..20).map(|k| 0.1 * 0.5f64.powi(k)).collect()
}

/// `A(x) = Σ_k A_k x^k`, entries stored as coefficient lists (constant first).
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFamily {
    n: usize,
    entries: Vec<Vec<Vec<Complex64>>>,
}

impl MatrixFamily {
    pub fn new(entries: Vec<Vec<Vec<Complex64>>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix family must be square and nonempty".into()));
        }
        Ok(MatrixFamily { n, entries })
    }

    pub fn from_real(entries: &[Vec<Vec<f64>>]) -> Result<Self> {
        Self::new(
            entries
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|p| p.iter().map(|&c| Complex64::new(c, 0.0)).collect())
                        .collect()
                })
                .collect(),
        )
    }

    /// `A(x) = A₀ + x A₁`.
    pub fn linear(a0: &ComplexMatrix, a1: &ComplexMatrix) -> Result<Self> {
        let n = a0.nrows();
        Self::new(
            (0..n)
                .map(|i| (0..n).map(|j| vec![a0[(i, j)], a1[(i, j)]]).collect())
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Vec<Vec<Complex64>>] {
        &self.entries
    }

    pub fn eval(&self, x: Complex64) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.n, |i, j| {
            self.entries[i][j]
                .iter()
                .rev()
                .fold(Complex64::zero(), |acc, c| acc * x + c)
        })
    }

    pub fn eval_real(&self, x: f64) -> ComplexMatrix {
        self.eval(Complex64::new(x, 0.0))
    }

    /// `A(0)` as an exact matrix when every constant term is real and within
    /// rounding of a rational of denominator at most `EXACT_DENOMINATOR`.
    pub fn at_zero_rational(&self) -> Option<RationalMatrix> {
        let rows: Option<Vec<Vec<BigRational>>> = self
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|p| {
                        rational_of(p.first().copied().unwrap_or_default())
                    })
                    .collect()
            })
            .collect();
        RationalMatrix::from_rows(rows?).ok()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    pub matrix: ComplexMatrix,
    pub idempotency_defect: f64,
    pub commutator_defect: f64,
}

impl Projector {
    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn norm(&self) -> f64 {
        op_norm(&self.matrix)
    }
}

fn op_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// `(1/2πi) ∮_{|z−λ|=r} (z − A)⁻¹ dz`.
pub fn eigenprojection(a: &ComplexMatrix, lambda: Complex64, radius: f64) -> Result<Projector> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::NonSquare {
            rows: n,
            cols: a.ncols(),
        });
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("contour radius {radius} must be positive")));
    }
    let spectrum = eigenvalues(a)?;
    let mut p = ComplexMatrix::zeros(n, n);
    let id = ComplexMatrix::identity(n, n);
    for k in 0..CONTOUR_NODES {
        let w = Complex64::from_polar(radius, 2.0 * PI * k as f64 / CONTOUR_NODES as f64);
        let z = lambda + w;
        let closest = spectrum.iter().map(|mu| (mu - z).norm()).fold(f64::INFINITY, f64::min);
        if closest < 1e-12 {
            return Err(Error::ContourHitsSpectrum(closest));
        }
        let r = (&id * z - a)
            .try_inverse()
            .ok_or(Error::ContourHitsSpectrum(closest))?;
        p += r * w;
    }
    p /= Complex64::new(CONTOUR_NODES as f64, 0.0);
    let idempotency_defect = op_norm(&(&p * &p - &p));
    let commutator_defect = op_norm(&(a * &p - &p * a));
    let scale = op_norm(&p).max(1.0);
    if idempotency_defect > 1e-8 * scale {
        return Err(Error::IdempotencyFailed(idempotency_defect));
    }
    Ok(Projector {
        matrix: p,
        idempotency_defect,
        commutator_defect,
    })
}

/// Eigenvalue clusters (points closer than `tol` relative are merged) with
/// their eigenprojections; radii are half the gap to the nearest other cluster.
pub fn spectral_projectors(a: &ComplexMatrix, tol: f64) -> Result<Vec<(Complex64, Projector)>> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for mu in eigenvalues(a)? {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|v| (v - mu).norm() <= tol * v.norm().max(1.0)))
        {
            Some(g) => g.push(mu),
            None => groups.push(vec![mu]),
        }
    }
    let centres: Vec<Complex64> = groups
        .iter()
        .map(|g| g.iter().sum::<Complex64>() / g.len() as f64)
        .collect();
    let mut out = Vec::new();
    for (i, c) in centres.iter().enumerate() {
        let spread = groups[i].iter().map(|v| (v - c).norm()).fold(0.0, f64::max);
        let gap = centres
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, d)| (d - c).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = if gap.is_finite() {
            gap / 2.0
        } else {
            1.0 + a.norm()
        };
        let radius = radius.max(2.0 * spread + f64::EPSILON);
        out.push((*c, eigenprojection(a, *c, radius)?));
    }
    out.sort_by(|a, b| spectral_order(&a.0, &b.0));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPath {
    pub samples: Vec<(Complex64, Complex64)>,
    pub matched: bool,
}

/// Greedy nearest-neighbour continuation of each eigenvalue along the ray.
pub fn track_eigenvalues(fam: &MatrixFamily, ray: &[f64]) -> Result<Vec<EigenPath>> {
    let mut paths: Vec<EigenPath> = Vec::new();
    for (k, &x) in ray.iter().enumerate() {
        let xc = Complex64::new(x, 0.0);
        let mut spec = eigenvalues(&fam.eval(xc))?;
        if k == 0 {
            spec.sort_by(spectral_order);
            paths = spec
                .into_iter()
                .map(|mu| EigenPath {
                    samples: vec![(xc, mu)],
                    matched: true,
                })
                .collect();
            continue;
        }
        let mut used = vec![false; spec.len()];
        for path in paths.iter_mut() {
            let prev = path.samples.last().expect("nonempty path").1;
            let mut ds: Vec<(f64, usize)> = spec
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, mu)| ((mu - prev).norm(), j))
                .collect();
            ds.sort_by(|a, b| a.0.total_cmp(&b.0));
            let j = ds[0].1;
            let twin = spec
                .iter()
                .enumerate()
                .any(|(i, mu)| i != j && (mu - spec[j]).norm() <= 1e-9);
            if twin {
                path.matched = false;
            }
            used[j] = true;
            path.samples.push((xc, spec[j]));
        }
    }
    Ok(paths)
}

/// Data of `A(0)` at one eigenvalue.
struct ZeroData {
    multiplicity: usize,
    semisimple: bool,
    /// Generalised eigenprojection along the complementary invariant subspace.
    projector: ComplexMatrix,
    /// Orthonormal basis of the eigenspace.
    eigenspace: ComplexMatrix,
}

fn rational_of(z: Complex64) -> Option<BigRational> {
    if z.im != 0.0 || !z.re.is_finite() {
        return None;
    }
    let r = approximate_rational(z.re, EXACT_DENOMINATOR);
    let back = to_f64(&r);
    ((back - z.re).abs() <= 1e-14 * z.re.abs().max(1.0)).then_some(r)
}

fn zero_data(fam: &MatrixFamily, lambda: Complex64) -> Result<ZeroData> {
    let n = fam.size();
    if let (Some(a0), Some(l)) = (fam.at_zero_rational(), rational_of(lambda)) {
        let shifted = &a0 - &RationalMatrix::identity(n).scale(&l);
        let big = shifted.pow(n as u32)?;
        let kernel = big.nullspace();
        let multiplicity = kernel.len();
        let semisimple = shifted.rank() == big.rank();
        let (_, pivots) = big.rref();
        let mut cols: Vec<Vec<BigRational>> = kernel.clone();
        cols.extend(pivots.iter().map(|&j| big.column(j)));
        let m = RationalMatrix::from_columns(&cols, n);
        let inv = m
            .inverse()?
            .ok_or_else(|| Error::Inconsistent("generalised eigenspaces do not split".into()))?;
        let mut d = RationalMatrix::zeros(n, n);
        for i in 0..multiplicity {
            d.set(i, i, BigRational::from_integer(1.into()));
        }
        let p = m.try_mul(&d)?.try_mul(&inv)?;
        let eig: Vec<Vec<BigRational>> = shifted.nullspace();
        let eigenspace = orthonormal_range(&RationalMatrix::from_columns(&eig, n).to_complex(), 1e-12);
        return Ok(ZeroData {
            multiplicity,
            semisimple,
            projector: p.to_complex(),
            eigenspace,
        });
    }
    let a0 = fam.eval_real(0.0);
    let shifted = &a0 - ComplexMatrix::identity(n, n) * lambda;
    let mut big = shifted.clone();
    for _ in 1..n {
        big = &big * &shifted;
    }
    let kernel = nullspace(&big, RANK_TOL);
    let range = orthonormal_range(&big, RANK_TOL);
    let eigenspace = nullspace(&shifted, RANK_TOL);
    let multiplicity = kernel.ncols();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..multiplicity {
        m.set_column(j, &kernel.column(j));
    }
    for j in 0..range.ncols().min(n - multiplicity) {
        m.set_column(multiplicity + j, &range.column(j));
    }
    let inv = m
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Inconsistent("generalised eigenspaces do not split".into()))?;
    let mut d = ComplexMatrix::zeros(n, n);
    for i in 0..multiplicity {
        d[(i, i)] = Complex64::new(1.0, 0.0);
    }
    Ok(ZeroData {
        multiplicity,
        semisimple: eigenspace.ncols() == multiplicity,
        projector: &m * d * inv,
        eigenspace,
    })
}

/// Split the spectrum at `x` into the `m` eigenvalues nearest `λ` and the rest;
/// returns the contour radius between them.
fn cluster_radius(spec: &[Complex64], lambda: Complex64, m: usize, x: f64) -> Result<f64> {
    let mut d: Vec<f64> = spec.iter().map(|mu| (mu - lambda).norm()).collect();
    d.sort_by(f64::total_cmp);
    let inner = d[m - 1];
    let outer = d.get(m).copied().unwrap_or(f64::INFINITY);
    if inner >= outer || outer - inner < 1e-12 {
        return Err(Error::ClusterAmbiguous(format!(
            "at x = {x:e}: cluster reaches {inner:e} but the rest starts at {outer:e}"
        )));
    }
    if outer.is_finite() {
        Ok((inner + outer) / 2.0)
    } else {
        Ok(inner + 1.0)
    }
}

#[derive(Clone, Debug)]
pub struct TotalProjectionReport {
    pub multiplicity: usize,
    pub xs: Vec<f64>,
    pub norms: Vec<f64>,
    /// `‖P^tot(x) − P₀‖` against the exact generalised eigenprojection of `A(0)`.
    pub errors: Vec<f64>,
    pub limit_norm: f64,
    pub bounded: bool,
    pub converged: bool,
}

pub fn total_projection_limit_check(
    fam: &MatrixFamily,
    lambda: Complex64,
    ray: &[f64],
) -> Result<TotalProjectionReport> {
    let z = zero_data(fam, lambda)?;
    if z.multiplicity == 0 {
        return Err(Error::InvalidInput(format!("{lambda} is not an eigenvalue of A(0)")));
    }
    let mut norms = Vec::new();
    let mut errors = Vec::new();
    for &x in ray {
        let a = fam.eval_real(x);
        let r = cluster_radius(&eigenvalues(&a)?, lambda, z.multiplicity, x)?;
        let p = eigenprojection(&a, lambda, r)?;
        norms.push(p.norm());
        errors.push(op_norm(&(&p.matrix - &z.projector)));
    }
    let limit_norm = op_norm(&z.projector);
    let bounded = norms.iter().all(|&v| v <= 2.0 * limit_norm.max(1.0));
    let converged = o_of_x(ray, &errors);
    Ok(TotalProjectionReport {
        multiplicity: z.multiplicity,
        xs: ray.to_vec(),
        norms,
        errors,
        limit_norm,
        bounded,
        converged,
    })
}

/// `err(x) ≤ C x` along the ray with `C` set by the first sample, or the
/// errors are already at rounding level.
fn o_of_x(ray: &[f64], errors: &[f64]) -> bool {
    if errors.iter().all(|&e| e <= 1e-10) {
        return true;
    }
    let c = 2.0 * (errors[0] / ray[0]).max(1.0);
    ray.iter().zip(errors).all(|(&x, &e)| e <= c * x + 1e-10)
}

/// Whether `λ` is a semisimple eigenvalue of `A(0)`.
pub fn is_semisimple(fam: &MatrixFamily, lambda: Complex64) -> Result<bool> {
    let z = zero_data(fam, lambda)?;
    Ok(z.multiplicity > 0 && z.semisimple)
}

/// Eigenvalues of `(A(x) − λ)P^tot(x)/x` restricted to the cluster, at each ray point.
fn reduced_spectra(fam: &MatrixFamily, lambda: Complex64, ray: &[f64], m: usize) -> Result<Vec<Vec<Complex64>>> {
    let n = fam.size();
    let mut out = Vec::new();
    for &x in ray {
        let a = fam.eval_real(x);
        let r = cluster_radius(&eigenvalues(&a)?, lambda, m, x)?;
        let p = eigenprojection(&a, lambda, r)?.matrix;
        let reduced = (&a - ComplexMatrix::identity(n, n) * lambda) * &p / Complex64::new(x, 0.0);
        let q = orthonormal_range(&p, 1e-8);
        let small = q.adjoint() * reduced * &q;
        let mut ev = eigenvalues(&small)?;
        ev.sort_by(spectral_order);
        out.push(ev);
    }
    Ok(out)
}

/// `λⱼ′(0)`: linear extrapolation to `x = 0` of consecutive reduced spectra,
/// keeping the pair whose extrapolations agree best with the previous pair.
pub fn derivative_spectrum(fam: &MatrixFamily, lambda: Complex64, ray: &[f64]) -> Result<Vec<Complex64>> {
    let z = zero_data(fam, lambda)?;
    if z.multiplicity == 0 || !z.semisimple {
        return Err(Error::NotSemisimple(format!(
            "{lambda} has algebraic multiplicity {} and geometric multiplicity {}",
            z.multiplicity,
            z.eigenspace.ncols()
        )));
    }
    if ray.len() < 2 {
        return Err(Error::InvalidInput("ray needs at least two points".into()));
    }
    let spectra = reduced_spectra(fam, lambda, ray, z.multiplicity)?;
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    let mut prev: Option<Vec<Complex64>> = None;
    for k in 0..ray.len() - 1 {
        let (x0, x1) = (ray[k], ray[k + 1]);
        let a = &spectra[k];
        let b = matched_to(a, &spectra[k + 1]);
        let ext: Vec<Complex64> = a
            .iter()
            .zip(&b)
            .map(|(fa, fb)| (fb * x0 - fa * x1) / (x0 - x1))
            .collect();
        if let Some(p) = &prev {
            let d = ext
                .iter()
                .zip(matched_to(&ext, p))
                .map(|(u, v)| (u - v).norm())
                .fold(0.0, f64::max);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, ext.clone()));
            }
        }
        prev = Some(ext);
    }
    let mut out = best.map(|b| b.1).or(prev).unwrap_or_default();
    out.sort_by(spectral_order);
    Ok(out)
}

/// Reorder `b` so that `b[i]` is the nearest unused entry to `a[i]`.
fn matched_to(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut used = vec![false; b.len()];
    a.iter()
        .map(|x| {
            let j = (0..b.len())
                .filter(|&j| !used[j])
                .min_by(|&i, &j| (b[i] - x).norm().total_cmp(&(b[j] - x).norm()))
                .expect("equal lengths");
            used[j] = true;
            b[j]
        })
        .collect()
}

/// A subspace of `ℂⁿ` by an orthonormal column basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: ComplexMatrix,
}

impl Subspace {
    /// Column span of `vectors`, orthonormalised.
    pub fn span(vectors: &ComplexMatrix) -> Self {
        Subspace {
            basis: orthonormal_range(vectors, 1e-12),
        }
    }

    /// The `k` dominant left singular directions of `m`, for matrices whose
    /// rank is known but whose small singular values carry rounding noise.
    pub fn dominant(m: &ComplexMatrix, k: usize) -> Self {
        let svd = svd(m.clone(), true, false);
        let u = svd.u.expect("requested left singular vectors");
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let mut basis = ComplexMatrix::zeros(m.nrows(), k);
        for (c, &i) in idx.iter().take(k).enumerate() {
            basis.set_column(c, &u.column(i));
        }
        Subspace { basis }
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn projector(&self) -> ComplexMatrix {
        &self.basis * self.basis.adjoint()
    }
}

/// `‖P_U − P_V‖₂`, the sine of the largest principal angle.
pub fn subspace_distance(u: &Subspace, v: &Subspace) -> Result<f64> {
    if u.dimension() != v.dimension() {
        return Err(Error::DimensionMismatch(u.dimension(), v.dimension()));
    }
    if u.ambient() != v.ambient() {
        return Err(Error::DimensionMismatch(u.ambient(), v.ambient()));
    }
    // fixed operand order so that the result is symmetric to the last bit
    let (pu, pv) = (u.projector(), v.projector());
    let swap = pu
        .iter()
        .zip(pv.iter())
        .map(|(a, b)| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)))
        .find(|o| o.is_ne())
        .is_some_and(|o| o.is_gt());
    let diff = if swap { pv - pu } else { pu - pv };
    Ok(op_norm(&diff).min(1.0))
}

#[derive(Clone, Debug)]
pub struct LineTrack {
    pub derivative: Complex64,
    pub norms: Vec<f64>,
    /// Distance between the lines at consecutive ray points.
    pub step_distances: Vec<f64>,
    pub limit: Subspace,
}

#[derive(Clone, Debug)]
pub struct SemisimpleReport {
    pub derivatives: Vec<Complex64>,
    pub lines: Vec<LineTrack>,
    /// Distance from the span of the limit lines to the eigenspace of `A(0)`.
    pub limit_span_distance: f64,
    pub bounded: bool,
    pub cauchy: bool,
}

pub fn semisimple_convergence_check(
    fam: &MatrixFamily,
    lambda: Complex64,
    ray: &[f64],
) -> Result<SemisimpleReport> {
    let z = zero_data(fam, lambda)?;
    let derivatives = derivative_spectrum(fam, lambda, ray)?;
    for i in 0..derivatives.len() {
        for j in i + 1..derivatives.len() {
            let gap = (derivatives[i] - derivatives[j]).norm();
            if gap < 1e-6 {
                return Err(Error::DerivativesCollide(format!(
                    "{} and {} are {gap:.2e} apart",
                    derivatives[i], derivatives[j]
                )));
            }
        }
    }
    let m = z.multiplicity;
    let mut tracks: Vec<(Vec<f64>, Vec<Subspace>)> = vec![(Vec::new(), Vec::new()); m];
    for &x in ray {
        let a = fam.eval_real(x);
        let spec = eigenvalues(&a)?;
        let mut near: Vec<Complex64> = spec.clone();
        near.sort_by(|p, q| (p - lambda).norm().total_cmp(&(q - lambda).norm()));
        near.truncate(m);
        let slopes: Vec<Complex64> = near.iter().map(|mu| (mu - lambda) / x).collect();
        let order = matched_to(&derivatives, &slopes);
        for (j, s) in order.iter().enumerate() {
            let mu = lambda + s * x;
            let gap = spec
                .iter()
                .map(|v| (v - mu).norm())
                .filter(|&d| d > 1e-12 * mu.norm().max(1.0))
                .fold(f64::INFINITY, f64::min);
            let r = if gap.is_finite() { gap / 2.0 } else { 1.0 };
            let p = eigenprojection(&a, mu, r)?;
            tracks[j].0.push(p.norm());
            tracks[j].1.push(Subspace::dominant(&p.matrix, 1));
        }
    }
    let mut lines = Vec::new();
    let mut limits = ComplexMatrix::zeros(fam.size(), m);
    let mut bounded = true;
    let mut cauchy = true;
    for (j, (norms, spaces)) in tracks.into_iter().enumerate() {
        let step_distances: Vec<f64> = spaces
            .windows(2)
            .map(|w| subspace_distance(&w[0], &w[1]).unwrap_or(1.0))
            .collect();
        let last = *norms.last().expect("nonempty ray");
        bounded &= norms.iter().all(|&v| v <= 2.0 * last.max(1.0));
        cauchy &= step_distances.last().is_none_or(|&d| d <= 1e-6);
        let limit = spaces.last().expect("nonempty ray").clone();
        limits.set_column(j, &limit.basis().column(0));
        lines.push(LineTrack {
            derivative: derivatives[j],
            norms,
            step_distances,
            limit,
        });
    }
    let span = Subspace::span(&limits);
    let eig = Subspace {
        basis: z.eigenspace.clone(),
    };
    let limit_span_distance = subspace_distance(&span, &eig).unwrap_or(1.0);
    Ok(SemisimpleReport {
        derivatives,
        lines,
        limit_span_distance,
        bounded,
        cauchy,
    })
}

/// `√(1 − |⟨u, v⟩|²)` for unit vectors: distance of lines in `ℙ(ℂⁿ)`.
fn line_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    let ip = (u.adjoint() * v)[(0, 0)].norm();
    (1.0 - ip * ip).max(0.0).sqrt()
}

/// Eigenvectors of a diagonalisable `A`, with the eigenvalue of each. Inside an
/// eigenspace of dimension `> 1` the basis is read off by pivoting on the
/// columns of its orthogonal projector, so it depends only on the subspace.
fn eigenvectors(a: &ComplexMatrix, x: f64) -> Result<Vec<(Complex64, ComplexMatrix)>> {
    let n = a.nrows();
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for mu in eigenvalues(a)? {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|v| (v - mu).norm() <= 1e-9 * v.norm().max(1.0)))
        {
            Some(g) => g.push(mu),
            None => groups.push(vec![mu]),
        }
    }
    let mut out = Vec::new();
    for g in groups {
        let mu = g.iter().sum::<Complex64>() / g.len() as f64;
        let k = nullspace(&(a - ComplexMatrix::identity(n, n) * mu), 1e-10);
        if k.ncols() != g.len() {
            return Err(Error::InvalidInput(format!(
                "A({x:e}) is not diagonalisable: eigenvalue {mu} has {} eigenvectors for multiplicity {}",
                k.ncols(),
                g.len()
            )));
        }
        let mut proj = &k * k.adjoint();
        for _ in 0..g.len() {
            let j = (0..n)
                .max_by(|&i, &j| proj.column(i).norm().total_cmp(&proj.column(j).norm()))
                .expect("n > 0");
            let v = proj.column(j).normalize();
            let vm = ComplexMatrix::from_column_slice(n, 1, v.as_slice());
            proj -= &vm * (vm.adjoint() * &proj);
            out.push((mu, vm));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct GevecCluster {
    /// Indices into the eigenvectors at the first ray point.
    pub members: Vec<usize>,
    pub eigenvalue: Complex64,
    /// Distance of the span of the cluster to the Jordan subspace at each ray point.
    pub distances: Vec<f64>,
    pub monotone: bool,
    /// At the last ray point, distance of the first `i` Gram–Schmidt vectors
    /// to the first `i` vectors of the Jordan chain.
    pub flag_distances: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct GevecReport {
    pub clusters: Vec<GevecCluster>,
    /// Limit lines of clusters with the same eigenvalue are mutually orthogonal.
    pub orthogonal_limits: bool,
}

/// Jordan chain `w₁ = ℓ`, `w_{i+1} = (A₀ − λ)⁺ wᵢ`.
fn jordan_chain(a0: &ComplexMatrix, lambda: Complex64, line: &ComplexMatrix, len: usize) -> Result<ComplexMatrix> {
    let n = a0.nrows();
    let shifted = a0 - ComplexMatrix::identity(n, n) * lambda;
    let eps = RANK_TOL * op_norm(&shifted).max(1.0);
    let pinv = svd(shifted, true, true)
        .pseudo_inverse(eps)
        .map_err(|e| Error::NonConvergence(e.to_string()))?;
    let mut cols = ComplexMatrix::zeros(n, len);
    let mut w = line.clone();
    for i in 0..len {
        cols.set_column(i, &w.column(0));
        w = &pinv * w;
    }
    Ok(cols)
}

fn gram_schmidt(vs: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let mut out: Vec<ComplexMatrix> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for q in &out {
            w -= q * (q.adjoint() * &w);
        }
        let nrm = w.norm();
        out.push(if nrm > 0.0 { w / Complex64::new(nrm, 0.0) } else { w });
    }
    out
}

pub fn gevec_convergence(fam: &MatrixFamily, ray: &[f64]) -> Result<GevecReport> {
    if ray.is_empty() {
        return Err(Error::InvalidInput("empty ray".into()));
    }
    let n = fam.size();
    // eigenvectors at each ray point, continued by nearest line
    let mut frames: Vec<Vec<(Complex64, ComplexMatrix)>> = Vec::new();
    for (k, &x) in ray.iter().enumerate() {
        let mut ev = eigenvectors(&fam.eval_real(x), x)?;
        if k > 0 {
            let prev = &frames[k - 1];
            let mut used = vec![false; ev.len()];
            let mut ordered = Vec::with_capacity(ev.len());
            for (_, pv) in prev {
                let j = (0..ev.len())
                    .filter(|&j| !used[j])
                    .min_by(|&i, &j| line_distance(pv, &ev[i].1).total_cmp(&line_distance(pv, &ev[j].1)))
                    .expect("same count");
                used[j] = true;
                ordered.push(ev[j].clone());
            }
            ev = ordered;
        }
        frames.push(ev);
    }
    let last = frames.last().expect("nonempty");
    // clusters of limit lines at the smallest x
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let mut joined = None;
        for (c, members) in clusters.iter().enumerate() {
            for &j in members {
                let d = line_distance(&last[i].1, &last[j].1);
                if (1e-4..1e-3).contains(&d) {
                    return Err(Error::ClusteringAmbiguous(format!(
                        "eigenvector lines {} and {} are {d:.2e} apart",
                        i + 1,
                        j + 1
                    )));
                }
                if d < 1e-4 {
                    joined = Some(c);
                }
            }
        }
        match joined {
            Some(c) => clusters[c].push(i),
            None => clusters.push(vec![i]),
        }
    }
    let a0 = fam.eval_real(0.0);
    let spec0 = match fam.at_zero_rational() {
        Some(r) => exact_spectrum(&r)?.into_iter().map(|p| p.0).collect(),
        None => eigenvalues(&a0)?,
    };
    let mut out = Vec::new();
    let mut heads: Vec<(Complex64, ComplexMatrix)> = Vec::new();
    for members in clusters {
        let mut members = members;
        // Gram–Schmidt order: descending |λⱼ| at the smallest x
        members.sort_by(|&i, &j| last[j].0.norm().total_cmp(&last[i].0.norm()).then(i.cmp(&j)));
        let approx = members.iter().map(|&i| last[i].0).sum::<Complex64>() / members.len() as f64;
        let eigenvalue = spec0
            .iter()
            .copied()
            .min_by(|a, b| (a - approx).norm().total_cmp(&(b - approx).norm()))
            .unwrap_or(approx);
        let first = &last[members[0]].1;
        let chain = jordan_chain(&a0, eigenvalue, first, members.len())?;
        let target = Subspace::span(&chain);
        let distances: Vec<f64> = frames
            .iter()
            .map(|f| {
                let mut m = ComplexMatrix::zeros(n, members.len());
                for (c, &i) in members.iter().enumerate() {
                    m.set_column(c, &f[i].1.column(0));
                }
                let s = Subspace::span(&m);
                subspace_distance(&s, &target).unwrap_or(1.0)
            })
            .collect();
        // spans that are exactly invariant sit at a rounding floor growing like ε/x
        let monotone = distances.windows(2).all(|w| w[1] <= w[0] + ROUNDING_FLOOR);
        let gs = gram_schmidt(&members.iter().map(|&i| last[i].1.clone()).collect::<Vec<_>>());
        let chain_gs = gram_schmidt(
            &(0..members.len())
                .map(|i| ComplexMatrix::from_column_slice(n, 1, chain.column(i).as_slice()))
                .collect::<Vec<_>>(),
        );
        let flag_distances = (1..=members.len())
            .map(|i| {
                let u = Subspace::span(&hstack(&gs[..i]));
                let v = Subspace::span(&hstack(&chain_gs[..i]));
                subspace_distance(&u, &v).unwrap_or(1.0)
            })
            .collect();
        heads.push((eigenvalue, first.clone()));
        out.push(GevecCluster {
            members,
            eigenvalue,
            distances,
            monotone,
            flag_distances,
        });
    }
    let mut orthogonal_limits = false;
    for i in 0..heads.len() {
        for j in i + 1..heads.len() {
            if (heads[i].0 - heads[j].0).norm() <= 1e-9 {
                let ip = (heads[i].1.adjoint() * &heads[j].1)[(0, 0)].norm();
                orthogonal_limits |= ip < 1e-8;
            }
        }
    }
    Ok(GevecReport {
        clusters: out,
        orthogonal_limits,
    })
}

fn hstack(cols: &[ComplexMatrix]) -> ComplexMatrix {
    let n = cols[0].nrows();
    ComplexMatrix::from_fn(n, cols.len(), |i, j| cols[j][(i, 0)])
}

/// Eigenvalues of `A(0)` with algebraic multiplicity: exact when `A(0)` is
/// rational, otherwise numeric with clusters merged at `1e-6`.
pub fn spectrum_at_zero(fam: &MatrixFamily) -> Result<Vec<(Complex64, usize)>> {
    if let Some(a0) = fam.at_zero_rational() {
        return exact_spectrum(&a0);
    }
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for mu in eigenvalues(&fam.eval_real(0.0))? {
        match out.iter_mut().find(|(v, _)| (v - mu).norm() <= 1e-6 * v.norm().max(1.0)) {
            Some(e) => e.1 += 1,
            None => out.push((mu, 1)),
        }
    }
    out.sort_by(|a, b| spectral_order(&a.0, &b.0));
    Ok(out)
}

/// Growth of one eigenvalue branch's projector along the ray.
#[derive(Clone, Debug)]
pub struct PoleFit {
    /// The branch's eigenvalue at the first ray point.
    pub start: Complex64,
    pub norms: Vec<f64>,
    /// Slope of `log ‖P(x)‖` against `log x`; `−1` is a simple pole.
    pub exponent: f64,
}

/// Projector norms of each tracked branch, with radius half the gap to the
/// nearest distinct eigenvalue. Coinciding branches share one projector.
pub fn pole_exponents(fam: &MatrixFamily, ray: &[f64]) -> Result<Vec<PoleFit>> {
    let paths = track_eigenvalues(fam, ray)?;
    let mut out = Vec::new();
    for path in &paths {
        let mut norms = Vec::with_capacity(ray.len());
        for (x, mu) in &path.samples {
            let a = fam.eval(*x);
            let gap = eigenvalues(&a)?
                .iter()
                .map(|v| (v - mu).norm())
                .filter(|&d| d > 1e-9 * mu.norm().max(1.0))
                .fold(f64::INFINITY, f64::min);
            let r = if gap.is_finite() { gap / 2.0 } else { 1.0 };
            norms.push(eigenprojection(&a, *mu, r)?.norm());
        }
        out.push(PoleFit {
            start: path.samples[0].1,
            exponent: log_log_slope(ray, &norms),
            norms,
        });
    }
    Ok(out)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn mat(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows.len(), rows[0].len(), |i, j| c(rows[i][j]))
    }

    /// `[[x, 1], [0, 0]]`
    fn exceptional() -> MatrixFamily {
        MatrixFamily::from_real(&[vec![vec![0.0, 1.0], vec![1.0]], vec![vec![0.0], vec![0.0]]]).unwrap()
    }

    /// `[[0, 0, 0], [0, x, 1], [0, 0, 0]]`
    fn three_by_three() -> MatrixFamily {
        MatrixFamily::from_real(&[
            vec![vec![0.0], vec![0.0], vec![0.0]],
            vec![vec![0.0], vec![0.0, 1.0], vec![1.0]],
            vec![vec![0.0], vec![0.0], vec![0.0]],
        ])
        .unwrap()
    }

    fn symmetric() -> MatrixFamily {
        MatrixFamily::from_real(&[vec![vec![0.0], vec![0.0, 1.0]], vec![vec![0.0, 1.0], vec![0.0]]]).unwrap()
    }

    fn diagonal() -> MatrixFamily {
        MatrixFamily::from_real(&[vec![vec![0.0, 1.0], vec![0.0]], vec![vec![0.0], vec![0.0, 2.0]]]).unwrap()
    }

    #[test]
    fn diagonal_projection() {
        let p = eigenprojection(&mat(&[&[0.0, 0.0], &[0.0, 1.0]]), c(0.0), 0.5).unwrap();
        assert!((p.matrix - mat(&[&[1.0, 0.0], &[0.0, 0.0]])).norm() < 1e-12);
    }

    #[test]
    fn exceptional_point_projectors() {
        let fam = exceptional();
        for x in [0.1, 0.01, 0.001] {
            let a = fam.eval_real(x);
            let p1 = eigenprojection(&a, c(x), x / 2.0).unwrap();
            let expected = mat(&[&[1.0, 1.0 / x], &[0.0, 0.0]]);
            assert!((&p1.matrix - expected).norm() < 1e-8 * (1.0 / x));
            let p2 = eigenprojection(&a, c(0.0), x / 2.0).unwrap();
            assert!((&p1.matrix + &p2.matrix - ComplexMatrix::identity(2, 2)).norm() < 1e-8);
        }
        assert!(matches!(
            eigenprojection(&fam.eval_real(0.1), c(0.1 - 0.05), 0.05),
            Err(Error::ContourHitsSpectrum(_))
        ));
    }

    #[test]
    fn pole_exponent() {
        let fam = exceptional();
        let ray = default_ray();
        let norms: Vec<f64> = ray
            .iter()
            .map(|&x| eigenprojection(&fam.eval_real(x), c(x), x / 2.0).unwrap().norm())
            .collect();
        assert!((log_log_slope(&ray, &norms) + 1.0).abs() < 0.05);
    }

    #[test]
    fn branch_exponents() {
        let fits = pole_exponents(&exceptional(), &default_ray()).unwrap();
        assert_eq!(fits.len(), 2);
        for f in &fits {
            assert!((f.exponent + 1.0).abs() < 0.05);
        }
        let fits = pole_exponents(&diagonal(), &default_ray()).unwrap();
        assert!(fits.iter().all(|f| f.exponent.abs() < 1e-6));
        let spec = spectrum_at_zero(&three_by_three()).unwrap();
        assert_eq!(spec, vec![(c(0.0), 3)]);
    }

    #[test]
    fn tracking() {
        let paths = track_eigenvalues(&exceptional(), &default_ray()).unwrap();
        assert_eq!(paths.len(), 2);
        for p in &paths {
            let moving = (p.samples[0].1 - p.samples[0].0).norm() < 1e-12;
            for (x, mu) in &p.samples {
                let target = if moving { *x } else { c(0.0) };
                assert!((mu - target).norm() < 1e-12);
            }
        }
        let paths = track_eigenvalues(&three_by_three(), &default_ray()).unwrap();
        assert_eq!(paths.iter().filter(|p| !p.matched).count(), 2);
    }

    #[test]
    fn total_projections() {
        let rep = total_projection_limit_check(&exceptional(), c(0.0), &default_ray()).unwrap();
        assert_eq!(rep.multiplicity, 2);
        assert!(rep.errors.iter().all(|&e| e < 1e-8) && rep.bounded && rep.converged);
        let rep = total_projection_limit_check(&three_by_three(), c(0.0), &default_ray()).unwrap();
        assert!(rep.converged && rep.bounded);
        let rep = total_projection_limit_check(&diagonal(), c(0.0), &default_ray()).unwrap();
        assert!(rep.errors.iter().all(|&e| e < 1e-8));
    }

    #[test]
    fn derivatives() {
        let d = derivative_spectrum(&diagonal(), c(0.0), &default_ray()).unwrap();
        assert!((d[0] - 1.0).norm() < 1e-8 && (d[1] - 2.0).norm() < 1e-8);
        let d = derivative_spectrum(&symmetric(), c(0.0), &default_ray()).unwrap();
        let mut re: Vec<f64> = d.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-8 && (re[1] - 1.0).abs() < 1e-8);
        assert!(matches!(
            derivative_spectrum(&exceptional(), c(0.0), &default_ray()),
            Err(Error::NotSemisimple(_))
        ));
    }

    #[test]
    fn distances() {
        let e = |i: usize| {
            let mut m = ComplexMatrix::zeros(3, 1);
            m[(i, 0)] = c(1.0);
            Subspace::span(&m)
        };
        assert_eq!(subspace_distance(&e(0), &e(0)).unwrap(), 0.0);
        assert!((subspace_distance(&e(0), &e(1)).unwrap() - 1.0).abs() < 1e-15);
        let x = 0.1;
        let v = Subspace::span(&ComplexMatrix::from_column_slice(3, 1, &[c(0.0), c(1.0), c(-x)]));
        let d = subspace_distance(&e(1), &v).unwrap();
        assert!((d - x / (1.0 + x * x).sqrt()).abs() < 1e-12);
        let two = Subspace::span(&mat(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]));
        assert!(matches!(subspace_distance(&e(0), &two), Err(Error::DimensionMismatch(1, 2))));
    }

    #[test]
    fn semisimple_lines() {
        let rep = semisimple_convergence_check(&symmetric(), c(0.0), &default_ray()).unwrap();
        assert!(rep.bounded && rep.cauchy && rep.limit_span_distance < 1e-8);
        let plus = Subspace::span(&mat(&[&[1.0], &[1.0]]));
        let minus = Subspace::span(&mat(&[&[1.0], &[-1.0]]));
        for l in &rep.lines {
            let target = if l.derivative.re > 0.0 { &plus } else { &minus };
            assert!(subspace_distance(&l.limit, target).unwrap() < 1e-8);
        }
        let rep = semisimple_convergence_check(&diagonal(), c(0.0), &default_ray()).unwrap();
        assert!(rep.cauchy && rep.limit_span_distance < 1e-8);
        assert!(matches!(
            semisimple_convergence_check(&exceptional(), c(0.0), &default_ray()),
            Err(Error::NotSemisimple(_))
        ));
    }

    #[test]
    fn gevecs_three_by_three() {
        let mut ray = default_ray();
        ray.push(1e-4);
        ray.sort_by(|a, b| b.total_cmp(a));
        let rep = gevec_convergence(&three_by_three(), &ray).unwrap();
        assert_eq!(rep.clusters.len(), 2);
        let single = rep.clusters.iter().find(|c| c.members.len() == 1).unwrap();
        let pair = rep.clusters.iter().find(|c| c.members.len() == 2).unwrap();
        for cl in [single, pair] {
            assert!(cl.monotone);
            assert!(*cl.distances.last().unwrap() < 1e-3);
        }
        assert!(rep.orthogonal_limits);
    }

    #[test]
    fn gevecs_exceptional() {
        let rep = gevec_convergence(&exceptional(), &default_ray()).unwrap();
        assert_eq!(rep.clusters.len(), 1);
        assert_eq!(rep.clusters[0].members.len(), 2);
        assert!(rep.clusters[0].distances.iter().all(|&d| d < 1e-12));
        assert!(rep.clusters[0].flag_distances[0] < 1e-5);
    }

    #[test]
    fn resolution_of_identity() {
        let a = mat(&[&[2.0, 1.0, 0.0], &[0.0, 2.0, 0.0], &[1.0, 0.0, -1.0]]);
        let ps = spectral_projectors(&a, 1e-6).unwrap();
        let sum = ps.iter().fold(ComplexMatrix::zeros(3, 3), |acc, (_, p)| acc + &p.matrix);
        assert!((sum - ComplexMatrix::identity(3, 3)).norm() < 1e-8);
    }
}
