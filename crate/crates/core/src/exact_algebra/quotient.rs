//! Finite-dimensional quotients `Q[x]/I` with standard-monomial bases.

use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::groebner::{groebner_basis, normal_form, GroebnerBasis};
use super::matrix::RationalMatrix;
use super::poly::{Monomial, Polynomial, Ring};
use crate::error::{Error, Result};

/// `Q[x]/I` with basis the standard monomials of `I` in increasing grevlex order.
#[derive(Clone, Debug)]
pub struct QuotientAlgebra {
    groebner: GroebnerBasis,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    mult_matrices: Vec<RationalMatrix>,
}

impl QuotientAlgebra {
    pub fn ring(&self) -> &Ring {
        self.groebner.ring()
    }

    pub fn groebner(&self) -> &GroebnerBasis {
        &self.groebner
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Multiplication by the `i`-th ring variable, acting on coordinate columns.
    pub fn mult_matrix(&self, i: usize) -> &RationalMatrix {
        &self.mult_matrices[i]
    }

    pub fn mult_matrices(&self) -> &[RationalMatrix] {
        &self.mult_matrices
    }

    pub fn reduce(&self, f: &Polynomial) -> Result<Polynomial> {
        normal_form(f, &self.groebner)
    }

    /// Coordinates of the class of `f` in the standard-monomial basis.
    pub fn coordinates(&self, f: &Polynomial) -> Result<Vec<BigRational>> {
        let r = self.reduce(f)?;
        let mut v = vec![BigRational::zero(); self.dimension()];
        for (m, c) in r.terms() {
            let i = self.index[m];
            v[i] = c.clone();
        }
        Ok(v)
    }

    pub fn element(&self, coords: &[BigRational]) -> Polynomial {
        Polynomial::from_terms(
            self.ring(),
            self.basis
                .iter()
                .zip(coords)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Matrix of multiplication by `f`.
    pub fn element_matrix(&self, f: &Polynomial) -> Result<RationalMatrix> {
        let n = self.dimension();
        let f = self.reduce(f)?;
        let mut m = RationalMatrix::zeros(n, n);
        for (j, b) in self.basis.iter().enumerate() {
            let prod = f.mul_term(b, &BigRational::one());
            for (i, c) in self.coordinates(&prod)?.into_iter().enumerate() {
                m.set(i, j, c);
            }
        }
        Ok(m)
    }
}

/// Enumerate standard monomials and assemble multiplication matrices.
pub fn quotient_algebra(g: &GroebnerBasis) -> Result<QuotientAlgebra> {
    let ring = g.ring().clone();
    let n = ring.nvars();
    let leads: Vec<Monomial> = g.leading_monomials().into_iter().cloned().collect();
    if !g.is_unit_ideal() {
        for v in 0..n {
            let bounded = leads
                .iter()
                .any(|m| m.pure_power_variable() == Some(v));
            if !bounded {
                return Err(Error::InfiniteDimensional(format!(
                    "no leading term is a pure power of {}",
                    ring.names()[v]
                )));
            }
        }
    }
    let standard = |m: &Monomial| !leads.iter().any(|l| l.divides(m));
    let mut basis_set: BTreeSet<Monomial> = BTreeSet::new();
    let one = Monomial::one(n);
    if standard(&one) {
        let mut frontier = vec![one];
        while let Some(m) = frontier.pop() {
            if !basis_set.insert(m.clone()) {
                continue;
            }
            for v in 0..n {
                let mut e = m.0.clone();
                e[v] += 1;
                let next = Monomial(e);
                if standard(&next) && !basis_set.contains(&next) {
                    frontier.push(next);
                }
            }
        }
    }
    let basis: Vec<Monomial> = basis_set.into_iter().collect();
    let index: HashMap<Monomial, usize> =
        basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut algebra = QuotientAlgebra {
        groebner: g.clone(),
        basis,
        index,
        mult_matrices: Vec::new(),
    };
    let dim = algebra.dimension();
    for v in 0..n {
        let mut m = RationalMatrix::zeros(dim, dim);
        for (j, b) in algebra.basis.iter().enumerate() {
            let mut e = b.0.clone();
            e[v] += 1;
            let prod = Polynomial::monomial(&ring, Monomial(e), BigRational::one());
            for (i, c) in algebra.coordinates(&prod)?.into_iter().enumerate() {
                m.set(i, j, c);
            }
        }
        algebra.mult_matrices.push(m);
    }
    Ok(algebra)
}

/// `A_f`: quotient of `A` by the generalised 0-eigenspace of multiplication by `f`.
pub fn localize(a: &QuotientAlgebra, f: &Polynomial) -> Result<QuotientAlgebra> {
    let n = a.dimension();
    if n == 0 {
        return Ok(a.clone());
    }
    let mf = a.element_matrix(f)?;
    let kernel = mf.pow(n as u32)?.nullspace();
    if kernel.is_empty() {
        return Ok(a.clone());
    }
    let mut gens: Vec<Polynomial> = a.groebner.generators().to_vec();
    gens.extend(kernel.iter().map(|v| a.element(v)));
    quotient_algebra(&groebner_basis(a.ring(), &gens)?)
}

/// Dimension of `ker(M_f^dim)`, the generalised 0-eigenspace of `f`.
pub fn nilpotent_dimension(a: &QuotientAlgebra, f: &Polynomial) -> Result<usize> {
    let n = a.dimension();
    if n == 0 {
        return Ok(0);
    }
    let mf = a.element_matrix(f)?;
    Ok(n - mf.pow(n as u32)?.rank())
}
