//! Univariate rational polynomials: characteristic and minimal polynomials,
//! factorisation over Q, and Jordan profiles.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::RationalMatrix;
use super::numeric::poly_roots;
use super::poly::{format_rational, rat, to_f64, Monomial, Polynomial, Ring};
use crate::error::{Error, Result};

/// Coefficients from the constant term upward; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `x - a`.
    pub fn linear(a: BigRational) -> Self {
        Self::new(vec![-a, BigRational::one()])
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = BigRational::one();
        UniPoly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading().recip();
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| c * &lc).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        if self.coeffs.len() < d.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); self.coeffs.len() - dd];
        let lc = d.leading();
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.divrem(self).1.is_zero()
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + to_f64(c))
    }

    /// `p(M)` by Horner's rule.
    pub fn eval_matrix(&self, m: &RationalMatrix) -> Result<RationalMatrix> {
        if !m.is_square() {
            return Err(Error::NonSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let n = m.nrows();
        let id = RationalMatrix::identity(n);
        let mut acc = RationalMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = &acc.try_mul(m)? + &id.scale(c);
        }
        Ok(acc)
    }

    /// `p(x^k)`.
    pub fn compose_power(&self, k: usize) -> Self {
        let mut c = vec![BigRational::zero(); self.degree() * k + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[i * k] = a.clone();
        }
        Self::new(c)
    }

    /// Embed as a polynomial in variable `var` of `ring`.
    pub fn to_polynomial(&self, ring: &Ring, var: usize) -> Polynomial {
        Polynomial::from_terms(
            ring,
            self.coeffs.iter().enumerate().map(|(k, c)| {
                let mut e = vec![0; ring.nvars()];
                e[var] = k as u32;
                (Monomial(e), c.clone())
            }),
        )
    }

    /// Read a polynomial that only involves variable `var`.
    pub fn from_polynomial(p: &Polynomial, var: usize) -> Result<Self> {
        let mut c = vec![BigRational::zero(); p.total_degree() as usize + 1];
        for (m, a) in p.terms() {
            if m.0.iter().enumerate().any(|(i, &e)| i != var && e > 0) {
                return Err(Error::InvalidInput(format!(
                    "{p} is not univariate in {}",
                    p.ring().names()[var]
                )));
            }
            c[m.0[var] as usize] = a.clone();
        }
        Ok(Self::new(c))
    }

    pub fn display_in(&self, var: &str) -> String {
        let ring = Ring::new(&[var]);
        self.to_polynomial(&ring, 0).to_string()
    }

    /// Primitive integer polynomial with positive leading coefficient, same roots.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().unwrap().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    /// Numeric complex roots (with repetition for repeated factors).
    pub fn roots(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for (f, m) in self.factor() {
            for r in simple_roots(&f) {
                out.extend(std::iter::repeat_n(r, m));
            }
        }
        out
    }

    /// Square-free decomposition (Yun): `self = lc · Π f_i^i`.
    pub fn squarefree(&self) -> Vec<(UniPoly, usize)> {
        if self.degree() == 0 {
            return Vec::new();
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.divrem(&a0).0;
        let mut c = fp.divrem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            b = b.divrem(&a).0;
            c = d.divrem(&a).0;
            d = c.sub(&b.derivative());
            if a.degree() > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    /// Factorisation into monic irreducibles over Q with multiplicities.
    pub fn factor(&self) -> Vec<(UniPoly, usize)> {
        let mut out = Vec::new();
        for (s, m) in self.squarefree() {
            for f in factor_squarefree(&s) {
                out.push((f, m));
            }
        }
        out.sort_by(|a, b| {
            a.0.degree()
                .cmp(&b.0.degree())
                .then_with(|| cmp_coeffs(&a.0, &b.0))
        });
        out
    }
}

fn cmp_coeffs(a: &UniPoly, b: &UniPoly) -> std::cmp::Ordering {
    for k in 0..a.coeffs.len().max(b.coeffs.len()) {
        match a.coeff(k).cmp(&b.coeff(k)) {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("X"))
    }
}

fn simple_roots(f: &UniPoly) -> Vec<Complex64> {
    let c: Vec<Complex64> = f
        .coeffs
        .iter()
        .map(|a| Complex64::new(to_f64(a), 0.0))
        .collect();
    poly_roots(&c)
}

/// Split a square-free polynomial into monic irreducibles.
///
/// Candidate factors come from subsets of numeric roots; each candidate is
/// accepted only after exact division.
fn factor_squarefree(f: &UniPoly) -> Vec<UniPoly> {
    let mut out = Vec::new();
    let mut rest = f.monic();
    // strip the factor x exactly so that roots at the origin never mislead rounding
    while rest.degree() > 0 && rest.coeff(0).is_zero() {
        out.push(UniPoly::monomial(1));
        rest = rest.divrem(&UniPoly::monomial(1)).0;
    }
    let mut roots = simple_roots(&rest);
    while rest.degree() > 0 {
        if rest.degree() == 1 {
            out.push(rest.monic());
            break;
        }
        let lead = rest.primitive_integer().last().unwrap().clone();
        let d = roots.len();
        let mut found = None;
        'sizes: for s in 1..=d / 2 {
            let mut idx: Vec<usize> = (0..s).collect();
            loop {
                if let Some(g) = candidate(&roots, &idx, &lead) {
                    if g.divides(&rest) {
                        found = Some((g, idx.clone()));
                        break 'sizes;
                    }
                }
                if !next_combination(&mut idx, d) {
                    break;
                }
            }
        }
        match found {
            Some((g, idx)) => {
                rest = rest.divrem(&g).0.monic();
                for &i in idx.iter().rev() {
                    roots.remove(i);
                }
                out.push(g);
            }
            None => {
                out.push(rest.monic());
                break;
            }
        }
    }
    out
}

/// Advance to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn candidate(roots: &[Complex64], idx: &[usize], lead: &BigInt) -> Option<UniPoly> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &i in idx {
        let r = roots[i];
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        c = next;
    }
    let a = lead.to_f64()?;
    let mut ints = Vec::with_capacity(c.len());
    for z in c {
        let v = z * a;
        let scale = v.norm().max(1.0);
        if v.im.abs() > 1e-6 * scale {
            return None;
        }
        let rounded = v.re.round();
        if (v.re - rounded).abs() > 1e-6 * scale || rounded.abs() > 9.0e15 {
            return None;
        }
        ints.push(rat(rounded as i64));
    }
    let g = UniPoly::new(ints);
    if g.degree() == 0 {
        return None;
    }
    Some(g.monic())
}

/// Characteristic polynomial by Faddeev–LeVerrier and minimal polynomial by the
/// first linear dependency among `I, M, M², …`.
pub fn char_min_poly(m: &RationalMatrix) -> Result<(UniPoly, UniPoly)> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok((characteristic_polynomial(m), minimal_polynomial(m)))
}

pub fn characteristic_polynomial(m: &RationalMatrix) -> UniPoly {
    let n = m.nrows();
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let id = RationalMatrix::identity(n);
    let mut mk = RationalMatrix::zeros(n, n);
    for k in 1..=n {
        mk = &(m * &mk) + &id.scale(&c[n - k + 1]);
        let am = m * &mk;
        c[n - k] = -am.trace() / rat(k as i64);
    }
    UniPoly::new(c)
}

pub fn minimal_polynomial(m: &RationalMatrix) -> UniPoly {
    let n = m.nrows();
    let mut powers: Vec<Vec<BigRational>> = Vec::new();
    let mut p = RationalMatrix::identity(n);
    for d in 0..=n {
        let flat: Vec<BigRational> = (0..n).flat_map(|i| p.row(i).to_vec()).collect();
        powers.push(flat);
        let cols = RationalMatrix::from_columns(&powers, n * n);
        let ns = cols.nullspace();
        if let Some(v) = ns.first() {
            // a single new column creates at most a one-dimensional dependency
            return UniPoly::new(v[..=d].to_vec()).monic();
        }
        p = &p * m;
    }
    unreachable!("Cayley-Hamilton bounds the minimal polynomial degree")
}

/// Jordan data of one irreducible factor: block sizes in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanEntry {
    pub factor: UniPoly,
    pub blocks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanProfile {
    pub dimension: usize,
    pub entries: Vec<JordanEntry>,
}

impl JordanProfile {
    /// Rank of `p(M)^k` implied by the profile.
    pub fn predicted_rank(&self, factor: &UniPoly, k: usize) -> Option<usize> {
        let e = self.entries.iter().find(|e| &e.factor == factor)?;
        let d = e.factor.degree();
        let lost: usize = e.blocks.iter().map(|&b| b.min(k) * d).sum();
        Some(self.dimension - lost)
    }

    pub fn entry(&self, factor: &UniPoly) -> Option<&JordanEntry> {
        self.entries.iter().find(|e| &e.factor == factor)
    }

    pub fn is_semisimple(&self) -> bool {
        self.entries.iter().all(|e| e.blocks.iter().all(|&b| b == 1))
    }
}

pub fn jordan_profile(m: &RationalMatrix) -> Result<JordanProfile> {
    let (chi, _) = char_min_poly(m)?;
    let n = m.nrows();
    let mut entries = Vec::new();
    for (p, mult) in chi.factor() {
        let d = p.degree();
        let pm = p.eval_matrix(m)?;
        let mut ranks = vec![n];
        let mut acc = RationalMatrix::identity(n);
        // the generalised eigenspace has dimension d·mult
        while n - ranks.last().unwrap() < d * mult {
            acc = &acc * &pm;
            ranks.push(acc.rank());
        }
        let kmax = ranks.len() - 1;
        let at_least: Vec<usize> = (1..=kmax).map(|k| (ranks[k - 1] - ranks[k]) / d).collect();
        let mut blocks = Vec::new();
        for k in 1..=kmax {
            let next = if k < kmax { at_least[k] } else { 0 };
            for _ in 0..(at_least[k - 1] - next) {
                blocks.push(k);
            }
        }
        blocks.sort_unstable_by(|a, b| b.cmp(a));
        entries.push(JordanEntry { factor: p, blocks });
    }
    Ok(JordanProfile {
        dimension: n,
        entries,
    })
}

/// Eigenvalues with algebraic multiplicity from the exact factorisation of the
/// characteristic polynomial. Roots are numeric but each factor is square-free.
pub fn exact_spectrum(m: &RationalMatrix) -> Result<Vec<(Complex64, usize)>> {
    let (chi, _) = char_min_poly(m)?;
    let mut out = Vec::new();
    for (p, mult) in chi.factor() {
        for r in simple_roots(&p) {
            out.push((r, mult));
        }
    }
    Ok(out)
}

pub fn format_coeffs(p: &UniPoly) -> Vec<String> {
    p.coeffs.iter().map(format_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> RationalMatrix {
        RationalMatrix::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn identity_polynomials() {
        let (c, mn) = char_min_poly(&RationalMatrix::identity(3)).unwrap();
        assert_eq!(c, UniPoly::from_i64(&[-1, 1]).pow(3));
        assert_eq!(mn, UniPoly::from_i64(&[-1, 1]));
    }

    #[test]
    fn nonsquare_rejected() {
        let a = RationalMatrix::zeros(2, 3);
        assert!(matches!(char_min_poly(&a), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn factor_examples() {
        // x^4 - 4x^2 = x^2 (x - 2)(x + 2)
        let f = UniPoly::from_i64(&[0, 0, -4, 0, 1]);
        let fac = f.factor();
        assert_eq!(fac.len(), 3);
        assert!(fac.contains(&(UniPoly::monomial(1), 2)));
        assert!(fac.contains(&(UniPoly::from_i64(&[2, 1]), 1)));
        assert!(fac.contains(&(UniPoly::from_i64(&[-2, 1]), 1)));
        // x^4 + 4 = (x^2 + 2x + 2)(x^2 - 2x + 2)
        let g = UniPoly::from_i64(&[4, 0, 0, 0, 1]).factor();
        assert_eq!(g.len(), 2);
        assert!(g.iter().all(|(p, m)| p.degree() == 2 && *m == 1));
        // x^2 - 2 irreducible
        assert_eq!(UniPoly::from_i64(&[-2, 0, 1]).factor().len(), 1);
        // (3x - 1)(x^2 + 1)
        let h = UniPoly::from_i64(&[-1, 3]).mul(&UniPoly::from_i64(&[1, 0, 1]));
        let hf = h.factor();
        assert_eq!(hf.len(), 2);
        assert!(hf.contains(&(UniPoly::new(vec![-crate::exact_algebra::poly::ratio(1, 3), rat(1)]), 1)));
    }

    #[test]
    fn jordan_examples() {
        let n3 = m(&[vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        let p = jordan_profile(&n3).unwrap();
        assert_eq!(p.entries, vec![JordanEntry { factor: UniPoly::monomial(1), blocks: vec![3] }]);
        let d = m(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 2]]);
        let p = jordan_profile(&d).unwrap();
        assert_eq!(p.entry(&UniPoly::from_i64(&[-1, 1])).unwrap().blocks, vec![1, 1]);
        assert_eq!(p.entry(&UniPoly::from_i64(&[-2, 1])).unwrap().blocks, vec![1]);
        assert!(p.is_semisimple());
    }

    #[test]
    fn companion_of_cube_roots() {
        let c = m(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]);
        let (chi, mn) = char_min_poly(&c).unwrap();
        assert_eq!(chi, UniPoly::from_i64(&[-1, 0, 0, 1]));
        assert_eq!(mn, chi);
        assert!(chi.eval_matrix(&c).unwrap().is_zero());
        let spec = exact_spectrum(&c).unwrap();
        assert_eq!(spec.len(), 3);
        for (z, mult) in spec {
            assert_eq!(mult, 1);
            assert!((z.powu(3) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn squarefree_decomposition() {
        // (x-1)^3 (x+2)
        let f = UniPoly::from_i64(&[-1, 1]).pow(3).mul(&UniPoly::from_i64(&[2, 1]));
        let sq = f.squarefree();
        assert_eq!(sq, vec![(UniPoly::from_i64(&[2, 1]), 1), (UniPoly::from_i64(&[-1, 1]), 3)]);
    }
}
