//! Batyrev presentations of quantum cohomology, symplectic cohomology as a
//! localisation, and the comparison maps from a base to a negative line bundle.
//!
//! Novikov parameter: relations carry `T^{c₁(β)}` with `t = T^{λ_X}`. Symbolic
//! work keeps `T` as the last ring variable, so every relation is homogeneous
//! with `deg xᵢ = deg T`. Linear algebra is done at `T = 1`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{
    exact_spectrum, groebner_basis, localize, nilpotent_dimension, normal_form, quotient_algebra,
    rat, GroebnerBasis, Monomial, Polynomial, QuotientAlgebra, RationalMatrix, Ring, UniPoly,
};
use crate::lattice_fan::{batyrev_decompose, primitive_collections, Fan, PrimitiveRelation};
use crate::polytope::MomentPolytope;

/// Naming of the divisor variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresentationMode {
    /// `x1, …, xr`.
    Compact,
    /// Last edge is the fibre: `x1, …, x(r−1), xf`.
    Nlb,
    /// Last edge is the exceptional divisor: `x1, …, x(r−1), x0`.
    Blowup,
}

impl PresentationMode {
    pub fn variable_names(self, r: usize) -> Vec<String> {
        (0..r)
            .map(|i| match self {
                PresentationMode::Nlb if i + 1 == r => "xf".to_string(),
                PresentationMode::Blowup if i + 1 == r => "x0".to_string(),
                _ => format!("x{}", i + 1),
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Presentation {
    pub mode: PresentationMode,
    /// Divisor variables followed by `T`.
    pub ring: Ring,
    /// Divisor variables only (the `T = 1` ring).
    pub x_ring: Ring,
    pub linear_relations: Vec<Polynomial>,
    pub qsr_relations: Vec<Polynomial>,
    pub relations: Vec<PrimitiveRelation>,
    pub lambda_x: u64,
    pub lambdas: Vec<BigRational>,
}

impl Presentation {
    pub fn num_divisors(&self) -> usize {
        self.x_ring.nvars()
    }

    pub fn t_index(&self) -> usize {
        self.num_divisors()
    }

    pub fn generators(&self) -> Vec<Polynomial> {
        let mut g = self.linear_relations.clone();
        g.extend(self.qsr_relations.iter().cloned());
        g
    }

    /// Gröbner basis with `T` as the lowest-priority variable.
    pub fn symbolic_basis(&self) -> Result<GroebnerBasis> {
        groebner_basis(&self.ring, &self.generators())
    }

    /// Set `T = value` and drop it.
    pub fn specialize(&self, p: &Polynomial, value: &BigRational) -> Polynomial {
        p.specialize(self.t_index(), value, &self.x_ring)
    }

    pub fn specialized_generators(&self, value: &BigRational) -> Vec<Polynomial> {
        self.generators()
            .iter()
            .map(|g| self.specialize(g, value))
            .filter(|g| !g.is_zero())
            .collect()
    }

    /// `Σ cᵢ xᵢ` in the `T = 1` ring.
    pub fn linear_class(&self, coeffs: &[BigRational]) -> Polynomial {
        let mut p = self.x_ring.zero();
        for (i, c) in coeffs.iter().enumerate() {
            p = &p + &self.x_ring.var(i).scale(c);
        }
        p
    }

    /// `c₁ = Σ xᵢ`.
    pub fn c1_class(&self) -> Polynomial {
        self.linear_class(&vec![BigRational::one(); self.num_divisors()])
    }

    /// `[ω] = −Σ λᵢ xᵢ`.
    pub fn omega_class(&self) -> Polynomial {
        let c: Vec<BigRational> = self.lambdas.iter().map(|l| -l.clone()).collect();
        self.linear_class(&c)
    }

    /// The same class in the symbolic ring.
    pub fn lift(&self, p: &Polynomial) -> Result<Polynomial> {
        p.embed(&self.ring)
    }

    /// Render with `t = T^{λ_X}` when every power of `T` allows it.
    pub fn display(&self, p: &Polynomial) -> String {
        display_in_t(p, self.t_index(), self.lambda_x)
    }
}

/// Replace `T^a` by `t^{a/λ}` when `λ` divides every exponent of `T`.
pub fn display_in_t(p: &Polynomial, t: usize, lambda: u64) -> String {
    let l = lambda.max(1) as u32;
    if p.terms().iter().any(|(m, _)| m.0[t] % l != 0) {
        return p.to_string();
    }
    let mut names: Vec<String> = p.ring().names().to_vec();
    names[t] = "t".into();
    let ring = Ring::new(&names);
    Polynomial::from_terms(
        &ring,
        p.terms().iter().map(|(m, c)| {
            let mut e = m.0.clone();
            e[t] /= l;
            (Monomial(e), c.clone())
        }),
    )
    .to_string()
}

/// Linear and quantum Stanley–Reisner relations, and the algebra at `T = 1`.
pub fn qh_presentation(
    fan: &Fan,
    polytope: &MomentPolytope,
    mode: PresentationMode,
) -> Result<(Presentation, QuotientAlgebra)> {
    let r = fan.num_edges();
    if polytope.edges() != fan.edges() {
        return Err(Error::InvalidInput("polytope edges differ from fan edges".into()));
    }
    let names = mode.variable_names(r);
    let mut all = names.clone();
    all.push("T".into());
    let ring = Ring::new(&all);
    let x_ring = Ring::new(&names);
    let lambda_x = fan.fano_index().unwrap_or(1);

    let linear_relations: Vec<Polynomial> = (0..fan.rank())
        .map(|a| {
            let mut p = ring.zero();
            for (i, e) in fan.edges().iter().enumerate() {
                p = &p + &ring.var(i).scale(&BigRational::from_integer(e.0[a].clone()));
            }
            p
        })
        .filter(|p| !p.is_zero())
        .collect();

    let mut relations = Vec::new();
    let mut qsr_relations = Vec::new();
    for set in primitive_collections(fan) {
        let rel = batyrev_decompose(fan, &set)?;
        let rel = PrimitiveRelation {
            class: rel.class.clone().with_omega(polytope.lambdas()),
            ..rel
        };
        let mut lhs = vec![0u32; r + 1];
        for &i in &rel.i {
            lhs[i] += 1;
        }
        let mut rhs = vec![0u32; r + 1];
        for (&j, &c) in rel.j.iter().zip(&rel.c) {
            rhs[j] += c as u32;
        }
        let c1 = rel.class.c1;
        if c1 >= 0 {
            rhs[r] += c1 as u32;
        } else {
            lhs[r] += (-c1) as u32;
        }
        let p = Polynomial::from_terms(
            &ring,
            [
                (Monomial(lhs), BigRational::one()),
                (Monomial(rhs), -BigRational::one()),
            ],
        );
        qsr_relations.push(p);
        relations.push(rel);
    }
    let pres = Presentation {
        mode,
        ring,
        x_ring,
        linear_relations,
        qsr_relations,
        relations,
        lambda_x,
        lambdas: polytope.lambdas().to_vec(),
    };
    let gens = pres.specialized_generators(&BigRational::one());
    let algebra = quotient_algebra(&groebner_basis(&pres.x_ring, &gens)?)?;
    Ok((pres, algebra))
}

/// Dimension of the classical ring (`T = 0`).
pub fn classical_dimension(pres: &Presentation) -> Result<usize> {
    let gens = pres.specialized_generators(&BigRational::zero());
    Ok(quotient_algebra(&groebner_basis(&pres.x_ring, &gens)?)?.dimension())
}

/// Localise successively at each class.
pub fn sh_presentation(a: &QuotientAlgebra, classes: &[Polynomial]) -> Result<QuotientAlgebra> {
    let mut out = a.clone();
    for c in classes {
        out = localize(&out, c)?;
    }
    Ok(out)
}

/// The class at which symplectic cohomology is a localisation: the fibre
/// divisor for bundles, every divisor for compact spaces.
pub fn sh_classes(pres: &Presentation) -> Vec<Polynomial> {
    match pres.mode {
        PresentationMode::Nlb => vec![pres.x_ring.var(pres.num_divisors() - 1)],
        _ => (0..pres.num_divisors()).map(|i| pres.x_ring.var(i)).collect(),
    }
}

pub fn c1_operator(a: &QuotientAlgebra, pres: &Presentation) -> Result<RationalMatrix> {
    a.element_matrix(&pres.c1_class())
}

pub fn omega_operator(a: &QuotientAlgebra, pres: &Presentation) -> Result<RationalMatrix> {
    a.element_matrix(&pres.omega_class())
}

/// `χ(x) = x^{d0} g(x^λ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenFamilyReport {
    pub d0: usize,
    pub g: UniPoly,
    pub holds: bool,
}

pub fn eigen_family_check(chi: &UniPoly, lambda_x: u64) -> EigenFamilyReport {
    let lambda = lambda_x.max(1) as usize;
    let d0 = chi.coeffs().iter().take_while(|c| c.is_zero()).count();
    let cof: Vec<BigRational> = chi.coeffs()[d0.min(chi.coeffs().len())..].to_vec();
    let holds = cof
        .iter()
        .enumerate()
        .all(|(k, c)| c.is_zero() || k % lambda == 0);
    let g = if holds {
        UniPoly::new(cof.iter().step_by(lambda).cloned().collect())
    } else {
        UniPoly::new(cof)
    };
    EigenFamilyReport { d0, g, holds }
}

/// `T_B^{λ_B} ↦ T_E^{λ_B − k} (Σ nᵢ xᵢ)^k`, identity on shared divisor variables.
#[derive(Clone, Debug)]
pub struct PhiMap {
    pub k: u64,
    /// `Σ nᵢ xᵢ` in the symbolic ring of the bundle.
    pub fiber_class: Polynomial,
}

impl PhiMap {
    pub fn new(pres_e: &Presentation, k: u64, n: &[i64]) -> Self {
        let mut p = pres_e.ring.zero();
        for (i, &ni) in n.iter().enumerate() {
            p = &p + &pres_e.ring.var(i).scale(&rat(ni));
        }
        PhiMap { k, fiber_class: p }
    }

    /// Image of a base polynomial in the symbolic ring of the bundle.
    pub fn apply(&self, pres_b: &Presentation, pres_e: &Presentation, p: &Polynomial) -> Result<Polynomial> {
        let lb = pres_b.lambda_x;
        let tb = pres_b.t_index();
        let te = pres_e.t_index();
        let lambda_e = lb
            .checked_sub(self.k)
            .ok_or_else(|| Error::NotMonotone(format!("k = {} exceeds the base index", self.k)))?;
        let mut out = pres_e.ring.zero();
        for (m, c) in p.terms() {
            let a = m.0[tb] as u64;
            if !a.is_multiple_of(lb) {
                return Err(Error::InvalidInput(format!(
                    "T^{a} is not a power of t = T^{lb}"
                )));
            }
            let q = (a / lb) as u32;
            let mut xs = m.clone();
            xs.0[tb] = 0;
            let base_term = Polynomial::monomial(p.ring(), xs, c.clone()).embed(&pres_e.ring)?;
            let mut te_pow = vec![0u32; pres_e.ring.nvars()];
            te_pow[te] = (lambda_e as u32) * q;
            let t_part = Polynomial::monomial(&pres_e.ring, Monomial(te_pow), BigRational::one());
            let term = &(&base_term * &t_part) * &self.fiber_class.pow(self.k as u32 * q);
            out = &out + &term;
        }
        Ok(out)
    }
}

/// Every base relation maps into the bundle ideal.
pub fn phi_check(pres_b: &Presentation, pres_e: &Presentation, phi: &PhiMap) -> Result<bool> {
    let g = pres_e.symbolic_basis()?;
    for rel in pres_b.generators() {
        let img = phi.apply(pres_b, pres_e, &rel)?;
        if !normal_form(&img, &g)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `χ_B` of `ω_B` at `t = 1`, made homogeneous in `T_B`, sent through `φ` with
/// `X ↦ ω_E`, lies in the bundle ideal.
pub fn char_poly_transfer_check(
    pres_b: &Presentation,
    pres_e: &Presentation,
    phi: &PhiMap,
    chi_b: &UniPoly,
) -> Result<bool> {
    let d = chi_b.degree();
    let x_b = Ring::new(&["X", "T"]);
    let mut homog = x_b.zero();
    for (j, c) in chi_b.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        homog = &homog + &Polynomial::monomial(&x_b, Monomial(vec![j as u32, (d - j) as u32]), c.clone());
    }
    let omega_e = pres_e.lift(&pres_e.omega_class())?;
    let g = pres_e.symbolic_basis()?;
    let lb = pres_b.lambda_x;
    let te = pres_e.t_index();
    let lambda_e = lb - phi.k;
    let mut image = pres_e.ring.zero();
    for (m, c) in homog.terms() {
        let (j, a) = (m.0[0], m.0[1] as u64);
        if a % lb != 0 {
            return Err(Error::InvalidInput(format!(
                "coefficient of X^{j} has T-degree {a}, not a multiple of {lb}"
            )));
        }
        let q = (a / lb) as u32;
        let mut tp = vec![0u32; pres_e.ring.nvars()];
        tp[te] = lambda_e as u32 * q;
        let t_part = Polynomial::monomial(&pres_e.ring, Monomial(tp), c.clone());
        let term = &(&t_part * &omega_e.pow(j)) * &phi.fiber_class.pow(phi.k as u32 * q);
        image = &image + &term;
    }
    Ok(normal_form(&image, &g)?.is_zero())
}

/// One eigenvalue family `{μ : μ^λ = ν}` with its total multiplicity.
#[derive(Clone, Debug)]
pub struct Family {
    pub invariant: Complex64,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct TransferReport {
    pub base_families: Vec<Family>,
    pub bundle_families: Vec<Family>,
    pub worst_residual: f64,
    pub dim_qh_e: usize,
    pub dim_sh_e: usize,
    pub dim_nilpotent: usize,
}

fn families(spectrum: &[(Complex64, usize)], power: u32, scale: Complex64) -> Vec<Family> {
    let mut out: Vec<Family> = Vec::new();
    for &(mu, mult) in spectrum {
        if mu == Complex64::new(0.0, 0.0) {
            continue;
        }
        let nu = mu.powu(power) / scale;
        match out
            .iter_mut()
            .find(|f| (f.invariant - nu).norm() <= 1e-8 * nu.norm().max(1.0))
        {
            Some(f) => f.count += mult,
            None => out.push(Family {
                invariant: nu,
                count: mult,
            }),
        }
    }
    out
}

/// `(μ^E)^{λ_B−k} = (−k)^k (μ^B)^{λ_B}` family by family, with multiplicities
/// scaling by `(λ_B − k)/λ_B`, and `dim QH(E) = dim SH(E) + dim ker ω_E^N`.
pub fn eigenvalue_transfer_check(
    omega_b: &RationalMatrix,
    qh_e: &QuotientAlgebra,
    sh_e: &QuotientAlgebra,
    pres_e: &Presentation,
    k: u64,
    lambda_b: u64,
) -> Result<TransferReport> {
    if k == 0 || k >= lambda_b {
        return Err(Error::NotMonotone(format!("k = {k} outside 1..{lambda_b}")));
    }
    let lambda_e = (lambda_b - k) as u32;
    let omega_e_sh = omega_operator(sh_e, pres_e)?;
    let spec_b = exact_spectrum(omega_b)?;
    let spec_e = exact_spectrum(&omega_e_sh)?;
    let scale = Complex64::new((-(k as f64)).powi(k as i32), 0.0);
    let fb = families(&spec_b, lambda_b as u32, Complex64::new(1.0, 0.0));
    let fe = families(&spec_e, lambda_e, scale);
    let mut worst = 0.0f64;
    let mut used = vec![false; fe.len()];
    for f in &fb {
        let best = fe
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, g)| (i, (g.invariant - f.invariant).norm() / f.invariant.norm().max(1.0)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let Some((i, r)) = best else {
            return Err(Error::Inconsistent(format!(
                "base family {:.6} has no bundle partner",
                f.invariant
            )));
        };
        used[i] = true;
        worst = worst.max(r);
        if f.count * lambda_e as usize != fe[i].count * lambda_b as usize {
            return Err(Error::Inconsistent(format!(
                "family {:.6}: {} base eigenvalues but {} bundle eigenvalues",
                f.invariant, f.count, fe[i].count
            )));
        }
    }
    if used.iter().any(|u| !u) {
        return Err(Error::Inconsistent("bundle family without a base partner".into()));
    }
    if worst > 1e-8 {
        return Err(Error::ToleranceExceeded {
            worst,
            tolerance: 1e-8,
        });
    }
    let dim_nil = nilpotent_dimension(qh_e, &pres_e.omega_class())?;
    if qh_e.dimension() != sh_e.dimension() + dim_nil {
        return Err(Error::Inconsistent(format!(
            "dim QH = {} but dim SH + dim ker = {} + {}",
            qh_e.dimension(),
            sh_e.dimension(),
            dim_nil
        )));
    }
    Ok(TransferReport {
        base_families: fb,
        bundle_families: fe,
        worst_residual: worst,
        dim_qh_e: qh_e.dimension(),
        dim_sh_e: sh_e.dimension(),
        dim_nilpotent: dim_nil,
    })
}

/// `(−k)^k` as an exact integer, for reporting.
pub fn transfer_constant(k: u64) -> BigInt {
    num_traits::pow(BigInt::from(-(k as i64)), k as usize)
}
