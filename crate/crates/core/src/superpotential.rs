//! Landau–Ginzburg superpotentials `W = Σ t^{−λᵢ} z^{eᵢ}`, their Jacobian rings
//! over the torus, critical points, and the checks that tie them to quantum
//! cohomology.
//!
//! Laurent monomials live in `ℚ[z₁, …, zₙ, u] / (u·z₁⋯zₙ − 1)`: `z^e` is stored
//! as `u^m z^{e + m}` with `m = max(0, −min e)`.
//!
//! Twisted coefficients `exp(s)` are rounded to rationals with denominator at
//! most [`TWIST_DENOMINATOR`]; the exact and floating-point stages then see the
//! same `W`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact_algebra::numeric::{eigenvalues, singular_values, svd};
use crate::exact_algebra::poly::{approximate_rational, to_f64};
use crate::exact_algebra::{
    exact_spectrum, format_rational, groebner_basis, quotient_algebra, rat, ComplexMatrix, Monomial,
    Polynomial, QuotientAlgebra, RationalMatrix, Ring,
};
use crate::lattice_fan::{Fan, LatticeVector};
use crate::polytope::{barycentre, half_space_certificate, positively_spans, MomentPolytope};
use crate::quantum_algebra::Presentation;

pub const TWIST_DENOMINATOR: i64 = 10_000;

/// One Laurent term `scale · t^{t_exponent} · exp(s_exponent) · z^{edge}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub edge: LatticeVector,
    pub t_exponent: BigRational,
    pub s_exponent: f64,
    pub scale: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Superpotential {
    pub rank: usize,
    pub terms: Vec<Term>,
}

/// One term per edge with `t^{−λᵢ}`; a twist `F` contributes `exp(−F(eᵢ))`.
pub fn build_superpotential(p: &MomentPolytope, twist: Option<&[f64]>) -> Result<Superpotential> {
    if let Some(f) = twist {
        if f.len() != p.edges().len() {
            return Err(Error::InvalidInput(format!(
                "twist has {} entries for {} edges",
                f.len(),
                p.edges().len()
            )));
        }
    }
    let terms = p
        .edges()
        .iter()
        .zip(p.lambdas())
        .enumerate()
        .map(|(i, (e, l))| Term {
            edge: e.clone(),
            t_exponent: -l.clone(),
            s_exponent: twist.map_or(0.0, |f| -f[i]),
            scale: BigRational::one(),
        })
        .collect();
    Ok(Superpotential {
        rank: p.rank(),
        terms,
    })
}

type Laurent = BTreeMap<Vec<i64>, BigRational>;

impl Superpotential {
    /// Terms with explicit rational coefficients and no `t` or `s` dependence.
    pub fn from_coefficients(rank: usize, terms: &[(Vec<i64>, BigRational)]) -> Self {
        Superpotential {
            rank,
            terms: terms
                .iter()
                .map(|(e, c)| Term {
                    edge: LatticeVector::from_i64(e),
                    t_exponent: BigRational::zero(),
                    s_exponent: 0.0,
                    scale: c.clone(),
                })
                .collect(),
        }
    }

    /// Coefficient of each term at `t = t_value`.
    pub fn coefficients(&self, t_value: &BigRational) -> Result<Vec<BigRational>> {
        self.terms
            .iter()
            .map(|term| {
                let mut c = term.scale.clone();
                if !t_value.is_one() && !term.t_exponent.is_zero() {
                    if !term.t_exponent.is_integer() {
                        return Err(Error::InvalidInput(format!(
                            "t^{} needs t = 1",
                            format_rational(&term.t_exponent)
                        )));
                    }
                    if t_value.is_zero() {
                        return Err(Error::InvalidInput("t must be nonzero".into()));
                    }
                    let k = term.t_exponent.to_integer().to_i32().ok_or_else(|| {
                        Error::InvalidInput("t exponent too large".into())
                    })?;
                    c *= num_traits::pow::pow(
                        if k >= 0 { t_value.clone() } else { t_value.recip() },
                        k.unsigned_abs() as usize,
                    );
                }
                if term.s_exponent != 0.0 {
                    c *= approximate_rational(term.s_exponent.exp(), TWIST_DENOMINATOR);
                }
                Ok(c)
            })
            .collect()
    }

    fn exponents(&self) -> Vec<Vec<i64>> {
        self.terms
            .iter()
            .map(|t| t.edge.to_i64().expect("small edge"))
            .collect()
    }

    fn laurent(&self, coeffs: &[BigRational]) -> Laurent {
        let mut out = Laurent::new();
        for (e, c) in self.exponents().into_iter().zip(coeffs) {
            *out.entry(e).or_insert_with(BigRational::zero) += c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// `z_a ∂W/∂z_a`.
    fn toric_derivative(&self, coeffs: &[BigRational], a: usize) -> Laurent {
        let mut out = Laurent::new();
        for (e, c) in self.laurent(coeffs) {
            let d = &c * rat(e[a]);
            if !d.is_zero() {
                out.insert(e, d);
            }
        }
        out
    }

    /// Value, toric gradient `zⱼ∂ⱼW` and toric Hessian at `z`.
    fn eval_toric(&self, c: &[Complex64], z: &[Complex64]) -> (Complex64, Vec<Complex64>, DMatrix<Complex64>) {
        let n = self.rank;
        let mut v = Complex64::zero();
        let mut g = vec![Complex64::zero(); n];
        let mut h = DMatrix::zeros(n, n);
        for (e, ci) in self.exponents().iter().zip(c) {
            let mono = e
                .iter()
                .zip(z)
                .fold(*ci, |acc, (&k, zj)| acc * zj.powi(k as i32));
            v += mono;
            for a in 0..n {
                g[a] += mono * e[a] as f64;
                for b in 0..n {
                    h[(a, b)] += mono * (e[a] * e[b]) as f64;
                }
            }
        }
        (v, g, h)
    }

    /// `W(z)` with the coefficients at `t = t_value`.
    pub fn evaluate(&self, t_value: &BigRational, z: &[Complex64]) -> Result<Complex64> {
        let c = complex_coeffs(&self.coefficients(t_value)?);
        Ok(self.eval_toric(&c, z).0)
    }

    /// Ordinary gradient `∂W/∂zⱼ`.
    pub fn gradient(&self, t_value: &BigRational, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let c = complex_coeffs(&self.coefficients(t_value)?);
        let (_, g, _) = self.eval_toric(&c, z);
        Ok(g.iter().zip(z).map(|(g, z)| g / z).collect())
    }
}

fn complex_coeffs(c: &[BigRational]) -> Vec<Complex64> {
    c.iter().map(|q| Complex64::new(to_f64(q), 0.0)).collect()
}

impl fmt::Display for Superpotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, term) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            if !term.scale.is_one() {
                factors.push(format_rational(&term.scale));
            }
            if term.t_exponent.is_one() {
                factors.push("t".to_string());
            } else if !term.t_exponent.is_zero() {
                factors.push(format!("t^{}", paren(&format_rational(&term.t_exponent))));
            }
            if term.s_exponent != 0.0 {
                factors.push(format!("exp({})", term.s_exponent));
            }
            for (j, e) in term.edge.0.iter().enumerate() {
                match e.to_i64() {
                    Some(0) => {}
                    Some(1) => factors.push(format!("z{}", j + 1)),
                    _ => factors.push(format!("z{}^{}", j + 1, paren(&e.to_string()))),
                }
            }
            if factors.is_empty() {
                factors.push("1".into());
            }
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

fn paren(s: &str) -> String {
    if s.starts_with('-') || s.contains('/') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

/// `Jac(W)` at a fixed `t`, with the matrix of multiplication by `W`.
#[derive(Clone, Debug)]
pub struct JacAlgebra {
    pub algebra: QuotientAlgebra,
    pub w_matrix: RationalMatrix,
    pub coefficients: Vec<BigRational>,
    pub w_poly: Polynomial,
}

impl JacAlgebra {
    pub fn dimension(&self) -> usize {
        self.algebra.dimension()
    }

    pub fn ring(&self) -> &Ring {
        self.algebra.ring()
    }

    /// Multiplication by `zⱼ`.
    pub fn z_matrix(&self, j: usize) -> &RationalMatrix {
        self.algebra.mult_matrix(j)
    }
}

fn torus_ring(n: usize) -> Ring {
    let mut names: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
    names.push("u".into());
    Ring::new(&names)
}

fn laurent_to_poly(ring: &Ring, l: &Laurent) -> Polynomial {
    let n = ring.nvars() - 1;
    Polynomial::from_terms(
        ring,
        l.iter().map(|(e, c)| {
            let m = e.iter().map(|&x| (-x).max(0)).max().unwrap_or(0);
            let mut exps: Vec<u32> = e.iter().map(|&x| (x + m) as u32).collect();
            exps.push(m as u32);
            debug_assert_eq!(exps.len(), n + 1);
            (Monomial(exps), c.clone())
        }),
    )
}

fn torus_relation(ring: &Ring) -> Polynomial {
    let n = ring.nvars() - 1;
    &Polynomial::monomial(ring, Monomial(vec![1; n + 1]), BigRational::one()) - &ring.one()
}

/// `ℚ[z^{±1}] / (z₁∂₁W, …, zₙ∂ₙW)`.
pub fn jacobian_ring(w: &Superpotential, t_value: &BigRational) -> Result<JacAlgebra> {
    let coefficients = w.coefficients(t_value)?;
    let ring = torus_ring(w.rank);
    let mut gens: Vec<Polynomial> = (0..w.rank)
        .map(|a| laurent_to_poly(&ring, &w.toric_derivative(&coefficients, a)))
        .collect();
    gens.push(torus_relation(&ring));
    let g = groebner_basis(&ring, &gens)?;
    let algebra = quotient_algebra(&g)?;
    let w_poly = laurent_to_poly(&ring, &w.laurent(&coefficients));
    let w_matrix = algebra.element_matrix(&w_poly)?;
    Ok(JacAlgebra {
        algebra,
        w_matrix,
        coefficients,
        w_poly,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint {
    pub coords: Vec<Complex64>,
    pub value: Complex64,
    pub hessian_rank: usize,
    pub nondegenerate: bool,
    pub multiplicity: usize,
    pub gradient_norm: f64,
}

/// Critical points found, plus starting points whose Newton polish failed.
#[derive(Clone, Debug)]
pub struct CriticalSet {
    pub points: Vec<CriticalPoint>,
    pub diverged: Vec<Error>,
}

impl CriticalSet {
    pub fn values(&self) -> Vec<Complex64> {
        self.points
            .iter()
            .flat_map(|p| std::iter::repeat_n(p.value, p.multiplicity))
            .collect()
    }
}

pub fn critical_points(w: &Superpotential, t_value: &BigRational) -> Result<CriticalSet> {
    let j = jacobian_ring(w, t_value)?;
    critical_points_in(w, &j, 0)
}

const CLUSTER_TOL: f64 = 1e-6;
const SEPARATION_TOL: f64 = 1e-3;
const MAX_ATTEMPTS: u64 = 5;

/// Stickelberger: a generic combination `R = Σ rⱼ M_{zⱼ}` has one eigenvalue
/// cluster per point, of size the local multiplicity; the left eigenspace of a
/// cluster is stable under every `M_{zⱼ}ᵀ`, which acts there with the single
/// eigenvalue `zⱼ(p)`.
pub fn critical_points_in(w: &Superpotential, jac: &JacAlgebra, seed: u64) -> Result<CriticalSet> {
    let n = w.rank;
    let dim = jac.dimension();
    if dim == 0 {
        return Ok(CriticalSet {
            points: vec![],
            diverged: vec![],
        });
    }
    let zt: Vec<ComplexMatrix> = (0..n)
        .map(|j| jac.z_matrix(j).transpose().to_complex())
        .collect();
    let coeffs = complex_coeffs(&jac.coefficients);
    let mut last_issue = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let r: Vec<f64> = (0..n).map(|_| rng.random_range(1..=997) as f64 / 97.0).collect();
        let mut rt = ComplexMatrix::zeros(dim, dim);
        for (m, rj) in zt.iter().zip(&r) {
            rt += m * Complex64::new(*rj, 0.0);
        }
        let clusters = cluster(&eigenvalues(&rt)?, CLUSTER_TOL);
        if let Some((a, b)) = closest_pair(&clusters) {
            let gap = (clusters[a].0 - clusters[b].0).norm();
            let scale = clusters[a].0.norm().max(clusters[b].0.norm()).max(1.0);
            if gap < SEPARATION_TOL * scale {
                last_issue = format!("eigenvalue clusters {gap:.2e} apart");
                continue;
            }
        }
        let mut points: Vec<CriticalPoint> = Vec::new();
        let mut diverged = Vec::new();
        for (mu, mult) in clusters {
            let shifted = &rt - ComplexMatrix::identity(dim, dim) * mu;
            let k = smallest_singular_subspace(&shifted, CLUSTER_TOL);
            let kh = k.adjoint();
            let guess: Vec<Complex64> = zt
                .iter()
                .map(|m| (&kh * m * &k).trace() / k.ncols() as f64)
                .collect();
            match polish(w, &coeffs, guess, mult) {
                Ok(p) => {
                    if let Some(q) = points.iter_mut().find(|q| same_point(&q.coords, &p.coords)) {
                        q.multiplicity += mult;
                    } else {
                        points.push(p);
                    }
                }
                Err(e) => diverged.push(e),
            }
        }
        points.sort_by(|a, b| crate::exact_algebra::spectral_order(&a.value, &b.value));
        return Ok(CriticalSet { points, diverged });
    }
    Err(Error::ClusteringAmbiguous(last_issue))
}

fn same_point(a: &[Complex64], b: &[Complex64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).norm() <= CLUSTER_TOL * x.norm().max(1.0))
}

/// Greedy single-linkage clusters `(mean, size)` at relative tolerance.
fn cluster(values: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &v in values {
        match groups.iter_mut().find(|g| {
            g.iter()
                .any(|x| (x - v).norm() <= tol * x.norm().max(v.norm()).max(1.0))
        }) {
            Some(g) => g.push(v),
            None => groups.push(vec![v]),
        }
    }
    groups
        .into_iter()
        .map(|g| (g.iter().sum::<Complex64>() / g.len() as f64, g.len()))
        .collect()
}

fn closest_pair(c: &[(Complex64, usize)]) -> Option<(usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            let d = (c[i].0 - c[j].0).norm();
            if best.is_none_or(|b| d < b.0) {
                best = Some((d, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Right singular vectors with `σ ≤ tol·σ_max`, and at least the smallest one.
fn smallest_singular_subspace(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let n = m.ncols();
    let svd = svd(m.clone(), false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let s = &svd.singular_values;
    let top = s.iter().copied().fold(0.0, f64::max);
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let mut keep: Vec<usize> = idx.iter().copied().filter(|&i| s[i] <= tol * top).collect();
    if keep.is_empty() {
        keep.push(idx[0]);
    }
    ComplexMatrix::from_fn(n, keep.len(), |j, k| vt[(keep[k], j)].conj())
}

fn gradient_norm(g: &[Complex64], z: &[Complex64]) -> f64 {
    g.iter()
        .zip(z)
        .map(|(g, z)| (g / z).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Newton in `log z` on the toric gradient, with least-squares steps so that
/// degenerate points still converge (linearly).
///
/// Singular values count toward the Hessian rank above `1e−8` of the term
/// scale `Σ |cᵢ z^{eᵢ}| ‖eᵢ‖²`. At a point of multiplicity `m` the position is
/// only known to `‖∇W‖^{1/m}`, and the cutoff is raised to match.
fn polish(
    w: &Superpotential,
    c: &[Complex64],
    mut z: Vec<Complex64>,
    multiplicity: usize,
) -> Result<CriticalPoint> {
    const TARGET: f64 = 1e-12;
    const ACCEPT: f64 = 1e-9;
    if z.iter().any(|x| x.norm() < 1e-300 || !x.is_finite()) {
        return Err(Error::NewtonDiverged(format!("start {z:?} is off the torus")));
    }
    let n = w.rank;
    let (_, mut g, mut h) = w.eval_toric(c, &z);
    let mut best = (gradient_norm(&g, &z), z.clone());
    for _ in 0..200 {
        if best.0 <= TARGET {
            break;
        }
        let rhs = DVector::from_iterator(n, g.iter().map(|x| -x));
        let step = match svd(h.clone(), true, true).solve(&rhs, 1e-14 * h.norm()) {
            Ok(s) => s,
            Err(_) => break,
        };
        for j in 0..n {
            z[j] *= step[j].exp();
        }
        if z.iter().any(|x| !x.is_finite() || x.norm() < 1e-300) {
            break;
        }
        (_, g, h) = w.eval_toric(c, &z);
        let gn = gradient_norm(&g, &z);
        if gn < best.0 {
            best = (gn, z.clone());
        }
    }
    let (gn, z) = best;
    if gn > ACCEPT {
        return Err(Error::NewtonDiverged(format!(
            "gradient {gn:.3e} after polishing near {:?}",
            z
        )));
    }
    let (value, _, h) = w.eval_toric(c, &z);
    let scale: f64 = w
        .exponents()
        .iter()
        .zip(c)
        .map(|(e, ci)| {
            let mono = e.iter().zip(&z).fold(*ci, |acc, (&k, zj)| acc * zj.powi(k as i32));
            mono.norm() * e.iter().map(|&k| (k * k) as f64).sum::<f64>()
        })
        .sum();
    let position_error = if multiplicity > 1 {
        10.0 * (gn / scale.max(f64::MIN_POSITIVE)).powf(1.0 / multiplicity as f64)
    } else {
        0.0
    };
    let cutoff = scale * position_error.max(1e-8);
    let hessian_rank = singular_values(&h).iter().filter(|&&x| x >= cutoff).count();
    Ok(CriticalPoint {
        coords: z,
        value,
        hessian_rank,
        nondegenerate: hessian_rank == n,
        multiplicity,
        gradient_norm: gn,
    })
}

/// Outcome of comparing quantum cohomology with `Jac(W)` at `t = 1`.
#[derive(Clone, Debug)]
pub struct MirrorReport {
    /// `(clause, holds, detail)` for clauses `a` to `d`.
    pub clauses: Vec<(char, bool, String)>,
}

impl MirrorReport {
    pub fn holds(&self) -> bool {
        self.clauses.iter().all(|c| c.1)
    }

    pub fn ensure(&self) -> Result<()> {
        match self.clauses.iter().find(|c| !c.1) {
            None => Ok(()),
            Some((clause, _, detail)) => Err(Error::MirrorMismatch {
                clause: clause.to_string(),
                detail: detail.clone(),
            }),
        }
    }
}

/// `xᵢ ↦ t^{−λᵢ} z^{eᵢ}` against `A`, which is `QH` for compact spaces and
/// `SH` for bundles.
pub fn mirror_check(
    pres: &Presentation,
    a: &QuotientAlgebra,
    w: &Superpotential,
    jac: &JacAlgebra,
) -> Result<MirrorReport> {
    let mut clauses = Vec::new();
    let lx = rat(pres.lambda_x as i64);

    // (a) both sides of each quantum relation carry the same power of t
    let mut bad = Vec::new();
    for rel in &pres.relations {
        let lhs: BigRational = rel.i.iter().map(|&i| -pres.lambdas[i].clone()).sum();
        let rhs: BigRational = rat(rel.class.c1) / &lx
            + rel
                .j
                .iter()
                .zip(&rel.c)
                .map(|(&j, &c)| -pres.lambdas[j].clone() * rat(c))
                .sum::<BigRational>();
        if lhs != rhs {
            bad.push(format!(
                "{:?}: t^{} vs t^{}",
                rel.i.iter().map(|i| i + 1).collect::<Vec<_>>(),
                format_rational(&lhs),
                format_rational(&rhs)
            ));
        }
    }
    clauses.push((
        'a',
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} quantum relations map to monomial identities", pres.relations.len())
        } else {
            bad.join("; ")
        },
    ));

    // (b) linear relations map to z_a ∂_a W
    let one = BigRational::one();
    let coeffs = w.coefficients(&one)?;
    let mut bad = Vec::new();
    for (a_idx, lin) in pres.linear_relations.iter().enumerate() {
        let lin = pres.specialize(lin, &one);
        let mut image = Laurent::new();
        for (i, term) in w.terms.iter().enumerate() {
            let c = lin.coefficient(&Monomial(unit(pres.num_divisors(), i)));
            if c.is_zero() {
                continue;
            }
            let e = term.edge.to_i64().expect("small edge");
            *image.entry(e).or_insert_with(BigRational::zero) += c * &coeffs[i];
        }
        image.retain(|_, c| !c.is_zero());
        let target = (0..w.rank)
            .map(|k| w.toric_derivative(&coeffs, k))
            .find(|d| *d == image);
        if target.is_none() {
            bad.push(format!("linear relation {}", a_idx + 1));
        }
    }
    clauses.push((
        'b',
        bad.is_empty() && pres.linear_relations.len() == w.rank,
        if bad.is_empty() {
            format!("{} linear relations map to z_j dW/dz_j", pres.linear_relations.len())
        } else {
            bad.join("; ")
        },
    ));

    // (c) dimensions
    clauses.push((
        'c',
        a.dimension() == jac.dimension(),
        format!("dim A = {}, dim Jac(W) = {}", a.dimension(), jac.dimension()),
    ));

    // (d) nonzero spectrum of c1 against the spectrum of W
    let c1 = a.element_matrix(&pres.c1_class())?;
    let mut sa = nonzero_spectrum(&c1)?;
    let mut sw = nonzero_spectrum(&jac.w_matrix)?;
    sa.sort_by(crate::exact_algebra::spectral_order);
    sw.sort_by(crate::exact_algebra::spectral_order);
    let worst = match_multisets(&sa, &sw);
    clauses.push((
        'd',
        worst.is_some_and(|x| x <= 1e-8),
        match worst {
            Some(x) => format!("{} nonzero eigenvalues agree to {x:.1e}", sa.len()),
            None => format!("{} vs {} nonzero eigenvalues", sa.len(), sw.len()),
        },
    ));
    Ok(MirrorReport { clauses })
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn nonzero_spectrum(m: &RationalMatrix) -> Result<Vec<Complex64>> {
    Ok(exact_spectrum(m)?
        .into_iter()
        .filter(|(z, _)| *z != Complex64::zero())
        .flat_map(|(z, k)| std::iter::repeat_n(z, k))
        .collect())
}

/// Largest relative distance in a greedy nearest matching, or `None` if the
/// sizes differ.
fn match_multisets(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm() / x.norm().max(1.0)))
            .min_by(|p, q| p.1.total_cmp(&q.1))?;
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

/// The value multiset is stable under multiplication by `e^{2πi/λ}`.
pub fn family_closure_check(values: &[Complex64], lambda_x: u64) -> bool {
    if lambda_x <= 1 {
        return true;
    }
    let xi = Complex64::from_polar(1.0, 2.0 * PI / lambda_x as f64);
    let rotated: Vec<Complex64> = values.iter().map(|v| v * xi).collect();
    match_multisets(values, &rotated).is_some_and(|d| d <= 1e-8)
}

#[derive(Clone, Debug)]
pub struct BarycentreLanding {
    pub barycentre: Vec<BigRational>,
    /// `⟨y, eᵢ⟩ − λᵢ` for each edge.
    pub exponents: Vec<BigRational>,
    pub holds: bool,
    /// Critical points of `Σ z^{eᵢ}` at `t = 1`.
    pub torus_points: Vec<CriticalPoint>,
}

/// With `y` the barycentre, `t^{−λᵢ}(t^y c)^{eᵢ} = t^{1/λ_X} c^{eᵢ}` for every
/// edge, so `z = t^y c` is critical for `W` whenever `c` is critical for
/// `Σ z^{eᵢ}`.
pub fn barycentre_landing_check(p: &MomentPolytope, lambda_x: u64) -> Result<BarycentreLanding> {
    let y = barycentre(p, lambda_x)?;
    let target = BigRational::new(1.into(), lambda_x.into());
    let exponents: Vec<BigRational> = p
        .edges()
        .iter()
        .zip(p.lambdas())
        .map(|(e, l)| {
            e.to_rationals()
                .iter()
                .zip(&y)
                .map(|(a, b)| a * b)
                .sum::<BigRational>()
                - l
        })
        .collect();
    let holds = exponents.iter().all(|x| *x == target);
    let flat = MomentPolytope::new(p.rank(), p.edges().to_vec(), vec![BigRational::zero(); p.edges().len()])?;
    let w = build_superpotential(&flat, None)?;
    let torus_points = critical_points(&w, &BigRational::one())?.points;
    Ok(BarycentreLanding {
        barycentre: y,
        exponents,
        holds,
        torus_points,
    })
}

#[derive(Clone, Debug)]
pub struct GalkinPoint {
    pub u: Vec<f64>,
    pub z: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub hessian_min_eigenvalue: f64,
    pub iterations: usize,
}

/// Minimum of `G(u) = Σ exp⟨u, eᵢ⟩`, which exists iff the edges positively span.
pub fn galkin_point(fan: &Fan) -> Result<GalkinPoint> {
    let n = fan.rank();
    if !positively_spans(fan.edges(), n) {
        let cert = half_space_certificate(fan.edges(), n).unwrap_or_default();
        return Err(Error::HalfSpaceFan(cert.iter().map(format_rational).collect()));
    }
    let edges: Vec<DVector<f64>> = fan
        .edges()
        .iter()
        .map(|e| DVector::from_vec(e.to_f64()))
        .collect();
    let eval = |u: &DVector<f64>| {
        let mut v = 0.0;
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for e in &edges {
            let x = e.dot(u).exp();
            v += x;
            g += e * x;
            h += e * e.transpose() * x;
        }
        (v, g, h)
    };
    let mut u = DVector::zeros(n);
    for it in 0..200 {
        let (v, g, h) = eval(&u);
        if g.norm() <= 1e-10 {
            let min_eig = h.symmetric_eigen().eigenvalues.min();
            return Ok(GalkinPoint {
                z: u.iter().map(|x| x.exp()).collect(),
                u: u.iter().copied().collect(),
                value: v,
                gradient_norm: g.norm(),
                hessian_min_eigenvalue: min_eig,
                iterations: it,
            });
        }
        let d = h
            .cholesky()
            .ok_or_else(|| Error::NonConvergence("Hessian lost definiteness".into()))?
            .solve(&(-&g));
        let slope = g.dot(&d);
        let mut step = 1.0;
        while eval(&(&u + &d * step)).0 > v + 1e-4 * step * slope && step > 1e-12 {
            step *= 0.5;
        }
        u += d * step;
    }
    Err(Error::NonConvergence("damped Newton did not reach gradient 1e-10".into()))
}

#[derive(Clone, Debug)]
pub struct SeparationReport {
    pub lambdas: Vec<f64>,
    pub coefficients: Vec<BigRational>,
    pub values: Vec<Complex64>,
    pub jac_dim: usize,
    pub morse: bool,
    pub min_gap: f64,
    pub min_abs_value: f64,
    pub diverged: usize,
    pub separated: bool,
}

impl SeparationReport {
    pub fn ensure(&self) -> Result<()> {
        if self.separated {
            return Ok(());
        }
        Err(Error::SeparationFailed(format!(
            "morse = {}, min gap = {:.3e}, min |value| = {:.3e}; retry with another seed",
            self.morse, self.min_gap, self.min_abs_value
        )))
    }
}

/// Jitter `λ` by `U(−radius, radius)` and use `exp(−λ′ᵢ)` as coefficients at `t = 1`.
pub fn perturb_and_separate(p: &MomentPolytope, seed: u64, radius: f64) -> Result<SeparationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas: Vec<f64> = p
        .lambdas()
        .iter()
        .map(|l| {
            let d = if radius > 0.0 {
                rng.random_range(-radius..radius)
            } else {
                0.0
            };
            to_f64(l) + d
        })
        .collect();
    let w = if radius > 0.0 {
        build_superpotential(p, Some(&lambdas))?
    } else {
        build_superpotential(p, None)?
    };
    let one = BigRational::one();
    let jac = jacobian_ring(&w, &one)?;
    let crit = critical_points_in(&w, &jac, seed)?;
    let values = crit.values();
    let morse = crit.diverged.is_empty()
        && crit.points.iter().all(|q| q.nondegenerate && q.multiplicity == 1)
        && crit.points.len() == jac.dimension();
    let mut min_gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            min_gap = min_gap.min((values[i] - values[j]).norm());
        }
    }
    let min_abs_value = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    let separated = morse && min_gap >= 1e-9 && min_abs_value >= 1e-9;
    Ok(SeparationReport {
        lambdas,
        coefficients: jac.coefficients.clone(),
        values,
        jac_dim: jac.dimension(),
        morse,
        min_gap,
        min_abs_value,
        diverged: crit.diverged.len(),
        separated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle_blowup::nlb_from_k;
    use crate::catalog;
    use crate::exact_algebra::ratio;
    use crate::quantum_algebra::{qh_presentation, sh_classes, sh_presentation, PresentationMode};

    fn one() -> BigRational {
        BigRational::one()
    }

    fn cube_roots_times_three() -> Vec<Complex64> {
        (0..3)
            .map(|k| Complex64::from_polar(3.0, 2.0 * PI * k as f64 / 3.0))
            .collect()
    }

    #[test]
    fn plane_superpotential_and_points() {
        let (f, p) = catalog::projective_space(2);
        let w = build_superpotential(&p, None).unwrap();
        assert_eq!(w.to_string(), "z1 + z2 + t*z1^(-1)*z2^(-1)");
        let j = jacobian_ring(&w, &one()).unwrap();
        assert_eq!(j.dimension(), 3);
        let crit = critical_points(&w, &one()).unwrap();
        assert_eq!(crit.points.len(), 3);
        assert!(crit.diverged.is_empty());
        let vals = crit.values();
        assert_eq!(match_multisets(&vals, &cube_roots_times_three()).map(|d| d < 1e-10), Some(true));
        for q in &crit.points {
            assert!(q.nondegenerate && q.gradient_norm <= 1e-12);
            assert!((q.coords[0] - q.coords[1]).norm() < 1e-10);
        }
        assert!(family_closure_check(&vals, 3));
        let (pres, a) = qh_presentation(&f, &p, PresentationMode::Compact).unwrap();
        let rep = mirror_check(&pres, &a, &w, &j).unwrap();
        rep.ensure().unwrap();
    }

    #[test]
    fn jacobian_at_other_t() {
        let (_, p) = catalog::projective_space(2);
        let w = build_superpotential(&p, None).unwrap();
        let crit = critical_points(&w, &rat(8)).unwrap();
        // values scale by t^{1/3} = 2
        let expected: Vec<Complex64> = cube_roots_times_three().iter().map(|v| v * 2.0).collect();
        assert!(match_multisets(&crit.values(), &expected).unwrap() < 1e-10);
    }

    #[test]
    fn bundle_over_projective_space() {
        for (m, k) in [(2usize, 1u64), (3, 1), (3, 2)] {
            let (b, pb) = catalog::projective_space(m);
            let (e, pe, _) = nlb_from_k(&b, &pb, k).unwrap();
            let w = build_superpotential(&pe, None).unwrap();
            let j = jacobian_ring(&w, &one()).unwrap();
            let lambda_e = m + 1 - k as usize;
            assert_eq!(j.dimension(), lambda_e);
            let crit = critical_points_in(&w, &j, 7).unwrap();
            for q in &crit.points {
                let wv = q.coords[0];
                assert!((q.coords[m] + wv * k as f64).norm() < 1e-9);
                let lhs = wv.powi(lambda_e as i32);
                let rhs = (-(k as f64)).powi(k as i32);
                assert!((lhs - rhs).norm() < 1e-9);
                assert!((q.value - wv * lambda_e as f64).norm() < 1e-9);
            }
            assert!(family_closure_check(&crit.values(), lambda_e as u64));
            let (pres, qh) = qh_presentation(&e, &pe, PresentationMode::Nlb).unwrap();
            let sh = sh_presentation(&qh, &sh_classes(&pres)).unwrap();
            mirror_check(&pres, &sh, &w, &j).unwrap().ensure().unwrap();
        }
    }

    #[test]
    fn conifold_like_bundle() {
        let (b, pb) = catalog::p1_times_p1();
        let (e, pe, _) = nlb_from_k(&b, &pb, 1).unwrap();
        let w = build_superpotential(&pe, None).unwrap();
        let j = jacobian_ring(&w, &one()).unwrap();
        assert_eq!(j.dimension(), 1);
        let crit = critical_points_in(&w, &j, 1).unwrap();
        assert_eq!(crit.points.len(), 1);
        assert!((crit.points[0].value + 4.0).norm() < 1e-10);
        let (pres, qh) = qh_presentation(&e, &pe, PresentationMode::Nlb).unwrap();
        let sh = sh_presentation(&qh, &sh_classes(&pres)).unwrap();
        mirror_check(&pres, &sh, &w, &j).unwrap().ensure().unwrap();
    }

    #[test]
    fn half_space_superpotential_has_no_points() {
        let w = Superpotential::from_coefficients(1, &[(vec![1], one())]);
        let j = jacobian_ring(&w, &one()).unwrap();
        assert_eq!(j.dimension(), 0);
        assert!(critical_points(&w, &one()).unwrap().points.is_empty());
    }

    #[test]
    fn degenerate_point_is_flagged() {
        // z W' = (z − 1)²(z + 1/2)/z: double root at 1, simple root at −1/2
        let w = Superpotential::from_coefficients(
            1,
            &[(vec![2], ratio(1, 2)), (vec![1], ratio(-3, 2)), (vec![-1], ratio(-1, 2))],
        );
        let j = jacobian_ring(&w, &one()).unwrap();
        assert_eq!(j.dimension(), 3);
        let crit = critical_points_in(&w, &j, 3).unwrap();
        assert_eq!(crit.points.len(), 2);
        let double = crit
            .points
            .iter()
            .find(|q| (q.coords[0] - 1.0).norm() < 1e-6)
            .unwrap();
        assert_eq!((double.multiplicity, double.nondegenerate), (2, false));
        // brute-force second derivative: W'' = 1 − 1/z³ vanishes at 1
        let z = Complex64::new(1.0, 0.0);
        assert!((1.0 - 1.0 / z.powi(3)).norm() < 1e-12);
        let simple = crit.points.iter().find(|q| q.multiplicity == 1).unwrap();
        assert!(simple.nondegenerate);
    }

    #[test]
    fn barycentre_exponents() {
        let (_, p) = catalog::projective_space(2);
        let rep = barycentre_landing_check(&p, 3).unwrap();
        assert!(rep.holds);
        assert!(rep.exponents.iter().all(|x| *x == ratio(1, 3)));
        assert_eq!(rep.torus_points.len(), 3);
        let (_, r) = catalog::projective_space_reflexive(2);
        let rep = barycentre_landing_check(&r, 1).unwrap();
        assert!(rep.barycentre.iter().all(|y| y.is_zero()));
    }

    #[test]
    fn galkin_examples() {
        let g = galkin_point(&catalog::projective_space_fan(2)).unwrap();
        assert!(g.u.iter().all(|x| x.abs() < 1e-12));
        assert!((g.value - 3.0).abs() < 1e-12 && g.hessian_min_eigenvalue > 0.0);
        let g = galkin_point(&catalog::p1_times_p1_fan()).unwrap();
        assert!((g.value - 4.0).abs() < 1e-12);
        let (b, pb) = catalog::projective_space(1);
        let (e, _, _) = nlb_from_k(&b, &pb, 1).unwrap();
        assert!(matches!(galkin_point(&e), Err(Error::HalfSpaceFan(_))));
    }

    #[test]
    fn separation() {
        let (_, p) = catalog::p1_times_p1();
        let flat = perturb_and_separate(&p, 0, 0.0).unwrap();
        assert!(!flat.separated);
        let rep = perturb_and_separate(&p, 11, 1e-2).unwrap();
        rep.ensure().unwrap();
        assert_eq!(rep.values.len(), 4);
        let (b, pb) = catalog::p1_times_p1();
        let (_, pe, _) = nlb_from_k(&b, &pb, 1).unwrap();
        let rep = perturb_and_separate(&pe, 5, 1e-2).unwrap();
        assert!(rep.jac_dim > 1);
    }
}
