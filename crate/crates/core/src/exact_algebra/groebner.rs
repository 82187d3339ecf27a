//! Buchberger's algorithm under grevlex, producing reduced bases.

use std::collections::BTreeSet;

use num_rational::BigRational;

use super::poly::{Monomial, Polynomial, Ring};
use crate::error::{Error, Result};

/// Reduced Gröbner basis: monic generators, no leading term divides another's term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    ring: Ring,
    generators: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn ordering(&self) -> &'static str {
        "grevlex"
    }

    /// True when the ideal is the whole ring.
    pub fn is_unit_ideal(&self) -> bool {
        self.generators.iter().any(|g| g.is_constant() && !g.is_zero())
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        Ok(normal_form(f, self)?.is_zero())
    }

    pub fn leading_monomials(&self) -> Vec<&Monomial> {
        self.generators
            .iter()
            .filter_map(|g| g.leading_monomial())
            .collect()
    }
}

/// Fully reduce `f` modulo `g`. The remainder has no term divisible by a leading term.
pub fn normal_form(f: &Polynomial, g: &GroebnerBasis) -> Result<Polynomial> {
    if f.ring() != &g.ring {
        return Err(Error::RingMismatch(format!(
            "{:?} vs {:?}",
            f.ring().names(),
            g.ring.names()
        )));
    }
    Ok(reduce(f, &g.generators))
}

fn reduce(f: &Polynomial, divisors: &[Polynomial]) -> Polynomial {
    let ring = f.ring().clone();
    let mut p = f.clone();
    let mut remainder: Vec<(Monomial, BigRational)> = Vec::new();
    while let Some((lm, lc)) = p.terms().first().cloned() {
        let hit = divisors.iter().find(|d| {
            d.leading_monomial()
                .map(|m| m.divides(&lm))
                .unwrap_or(false)
        });
        match hit {
            Some(d) => {
                let dm = d.leading_monomial().unwrap();
                let q = dm.quotient_of(&lm);
                let c = lc / d.leading_coefficient().unwrap();
                p = &p - &d.mul_term(&q, &c);
            }
            None => {
                remainder.push((lm.clone(), lc.clone()));
                p = &p - &Polynomial::monomial(&ring, lm, lc);
            }
        }
    }
    // collected in decreasing order already
    Polynomial::from_terms(&ring, remainder)
}

fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let fm = f.leading_monomial().unwrap();
    let gm = g.leading_monomial().unwrap();
    let l = fm.lcm(gm);
    let a = f.mul_term(&fm.quotient_of(&l), &f.leading_coefficient().unwrap().recip());
    let b = g.mul_term(&gm.quotient_of(&l), &g.leading_coefficient().unwrap().recip());
    &a - &b
}

/// Gröbner basis of the ideal generated by `generators`, all in `ring`.
pub fn groebner_basis(ring: &Ring, generators: &[Polynomial]) -> Result<GroebnerBasis> {
    for g in generators {
        if g.ring() != ring {
            return Err(Error::RingMismatch(format!(
                "generator in {:?}, expected {:?}",
                g.ring().names(),
                ring.names()
            )));
        }
    }
    let mut basis: Vec<Polynomial> = Vec::new();
    for g in generators {
        let r = reduce(g, &basis);
        if !r.is_zero() {
            basis.push(r.monic());
        }
    }
    if basis.iter().any(|b| b.is_constant()) {
        return Ok(GroebnerBasis {
            ring: ring.clone(),
            generators: vec![ring.one()],
        });
    }

    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.insert((i, j));
        }
    }
    while !pairs.is_empty() {
        // normal strategy: smallest lcm first
        let &(i, j) = pairs
            .iter()
            .min_by(|a, b| {
                let la = lm(&basis[a.0]).lcm(lm(&basis[a.1]));
                let lb = lm(&basis[b.0]).lcm(lm(&basis[b.1]));
                la.cmp(&lb).then(a.cmp(b))
            })
            .unwrap();
        pairs.remove(&(i, j));
        let (mi, mj) = (lm(&basis[i]), lm(&basis[j]));
        if mi.coprime(mj) {
            continue;
        }
        let l = mi.lcm(mj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && lm(&basis[k]).divides(&l)
                && !pairs.contains(&ordered(i, k))
                && !pairs.contains(&ordered(j, k))
        });
        if chain {
            continue;
        }
        let r = reduce(&s_polynomial(&basis[i], &basis[j]), &basis);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return Ok(GroebnerBasis {
                ring: ring.clone(),
                generators: vec![ring.one()],
            });
        }
        let n = basis.len();
        basis.push(r.monic());
        for k in 0..n {
            pairs.insert((k, n));
        }
    }
    Ok(GroebnerBasis {
        ring: ring.clone(),
        generators: reduce_basis(basis),
    })
}

fn lm(p: &Polynomial) -> &Monomial {
    p.leading_monomial().expect("zero polynomial in basis")
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn reduce_basis(basis: Vec<Polynomial>) -> Vec<Polynomial> {
    // minimal basis: drop generators whose leading term is divisible by another's
    let mut minimal: Vec<Polynomial> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let m = lm(g);
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            j != i && lm(h).divides(m) && (lm(h) != m || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Polynomial> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.clone())
            .collect();
        let head = Polynomial::from_terms(
            minimal[i].ring(),
            minimal[i].terms()[..1].iter().cloned(),
        );
        let tail = &minimal[i] - &head;
        let r = &head + &reduce(&tail, &others);
        reduced.push(r.monic());
    }
    reduced.sort_by(|a, b| lm(a).cmp(lm(b)));
    reduced
}

/// Membership test without building a quotient.
pub fn ideal_contains(g: &GroebnerBasis, f: &Polynomial) -> Result<bool> {
    g.contains(f)
}
