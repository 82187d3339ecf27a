//! Sparse multivariate polynomials over the rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Integer as a rational.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `num / den` as a reduced rational. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `"p/q"` (or `"p"` for integers).
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Best rational approximation with denominator at most `max_den` (continued fractions).
pub fn approximate_rational(x: f64, max_den: i64) -> BigRational {
    if !x.is_finite() {
        return BigRational::zero();
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1.is_zero() {
        return BigRational::from_integer(BigInt::from(x.round() as i64));
    }
    BigRational::new(h1, k1)
}

/// Ordered variable names of a polynomial ring. Earlier names have higher priority.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    names: Arc<Vec<String>>,
}

impl Ring {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        Ring {
            names: Arc::new(names.iter().map(|s| s.as_ref().to_string()).collect()),
        }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn var(&self, i: usize) -> Polynomial {
        assert!(i < self.nvars(), "variable index out of range");
        let mut e = vec![0; self.nvars()];
        e[i] = 1;
        Polynomial::monomial(self, Monomial(e), BigRational::one())
    }

    pub fn var_named(&self, name: &str) -> Option<Polynomial> {
        self.index_of(name).map(|i| self.var(i))
    }

    pub fn constant(&self, c: BigRational) -> Polynomial {
        Polynomial::monomial(self, Monomial::one(self.nvars()), c)
    }

    pub fn one(&self) -> Polynomial {
        self.constant(BigRational::one())
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self)
    }

    /// Parse an expanded polynomial such as `"x1^2*x2 - 3/2*T^3 + 1"`.
    pub fn parse(&self, text: &str) -> Result<Polynomial> {
        parse_polynomial(self, text)
    }
}

/// Exponent vector. Ordered by graded reverse lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self | other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Position of the single variable if this is a pure power `x_i^k`, `k >= 1`.
    pub fn pure_power_variable(&self) -> Option<usize> {
        let mut found = None;
        for (i, &e) in self.0.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                // smaller exponent in the last differing variable is larger
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with terms sorted by decreasing grevlex order and no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    ring: Ring,
    terms: Vec<(Monomial, BigRational)>,
}

impl Polynomial {
    pub fn zero(ring: &Ring) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn monomial(ring: &Ring, m: Monomial, c: BigRational) -> Self {
        assert_eq!(m.0.len(), ring.nvars(), "monomial length does not match ring");
        if c.is_zero() {
            return Polynomial::zero(ring);
        }
        Polynomial {
            ring: ring.clone(),
            terms: vec![(m, c)],
        }
    }

    /// Build from arbitrary terms, combining duplicates and dropping zeros.
    pub fn from_terms<I>(ring: &Ring, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut acc: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.0.len(), ring.nvars(), "monomial length does not match ring");
            *acc.entry(m).or_insert_with(BigRational::zero) += c;
        }
        let terms = acc
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|(m, _)| m)
    }

    pub fn leading_coefficient(&self) -> Option<&BigRational> {
        self.terms.first().map(|(_, c)| c)
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.iter().map(|(m, _)| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms
            .iter()
            .find(|(t, _)| t == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Polynomial {
        match self.leading_coefficient() {
            None => self.clone(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        // multiplying by a monomial preserves the order
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(t, a)| (t.mul(m), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = self.ring.one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn check_ring(&self, other: &Polynomial) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "{:?} vs {:?}",
                self.ring.names(),
                other.ring.names()
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_ring(other)?;
        Ok(merge(self, other, false))
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_ring(other)?;
        Ok(merge(self, other, true))
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_ring(other)?;
        let mut acc: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                *acc.entry(m.mul(n)).or_insert_with(BigRational::zero) += a * b;
            }
        }
        Ok(Polynomial {
            ring: self.ring.clone(),
            terms: acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    /// Substitute polynomials (in a common target ring) for every variable.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.ring.nvars() {
            return Err(Error::InvalidInput(format!(
                "substitution needs {} images, got {}",
                self.ring.nvars(),
                images.len()
            )));
        }
        let target = match images.first() {
            Some(p) => p.ring.clone(),
            None => return Ok(self.clone()),
        };
        let mut out = Polynomial::zero(&target);
        for (m, c) in &self.terms {
            let mut term = target.constant(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.try_mul(&images[i].pow(e))?;
                }
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// Re-express in a ring whose variables include all of ours (matched by name).
    pub fn embed(&self, target: &Ring) -> Result<Polynomial> {
        let map: Vec<usize> = self
            .ring
            .names()
            .iter()
            .map(|n| {
                target
                    .index_of(n)
                    .ok_or_else(|| Error::RingMismatch(format!("variable {n} missing in target")))
            })
            .collect::<Result<_>>()?;
        Ok(Polynomial::from_terms(
            target,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0; target.nvars()];
                for (i, &k) in m.0.iter().enumerate() {
                    e[map[i]] = k;
                }
                (Monomial(e), c.clone())
            }),
        ))
    }

    /// Set variable `i` to a rational constant and drop it from the ring.
    pub fn specialize(&self, i: usize, value: &BigRational, target: &Ring) -> Polynomial {
        assert_eq!(target.nvars() + 1, self.ring.nvars());
        Polynomial::from_terms(
            target,
            self.terms.iter().map(|(m, c)| {
                let mut e = m.0.clone();
                let k = e.remove(i);
                let mut coeff = c.clone();
                for _ in 0..k {
                    coeff *= value;
                }
                (Monomial(e), coeff)
            }),
        )
    }

    /// Homogenise with respect to variable `h` (which must not occur).
    pub fn homogenize(&self, h: usize) -> Polynomial {
        let d = self.total_degree();
        Polynomial::from_terms(
            &self.ring,
            self.terms.iter().map(|(m, c)| {
                let mut e = m.0.clone();
                e[h] += (d - m.degree()) as u32;
                (Monomial(e), c.clone())
            }),
        )
    }

    pub fn evaluate(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }
}

fn merge(a: &Polynomial, b: &Polynomial, negate_b: bool) -> Polynomial {
    let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() || j < b.terms.len() {
        let ord = match (a.terms.get(i), b.terms.get(j)) {
            (Some((m, _)), Some((n, _))) => m.cmp(n),
            (Some(_), None) => Ordering::Greater,
            (None, Some(_)) => Ordering::Less,
            (None, None) => unreachable!(),
        };
        match ord {
            Ordering::Greater => {
                out.push(a.terms[i].clone());
                i += 1;
            }
            Ordering::Less => {
                let (n, c) = &b.terms[j];
                out.push((n.clone(), if negate_b { -c } else { c.clone() }));
                j += 1;
            }
            Ordering::Equal => {
                let c = if negate_b {
                    &a.terms[i].1 - &b.terms[j].1
                } else {
                    &a.terms[i].1 + &b.terms[j].1
                };
                if !c.is_zero() {
                    out.push((a.terms[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    Polynomial {
        ring: a.ring.clone(),
        terms: out,
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("ring mismatch in polynomial addition")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("ring mismatch in polynomial subtraction")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("ring mismatch in polynomial multiplication")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-BigRational::one())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = &self.ring.names()[i];
                    if e == 1 {
                        name.clone()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else {
                if !abs.is_one() {
                    write!(f, "{}*", format_rational(&abs))?;
                }
                write!(f, "{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

fn parse_polynomial(ring: &Ring, text: &str) -> Result<Polynomial> {
    let bad = |msg: &str| Error::InvalidInput(format!("cannot parse polynomial {text:?}: {msg}"));
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(bad("empty"));
    }
    // split into signed terms
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (i, ch) in cleaned.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !cur.is_empty() {
            pieces.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else if (ch == '+' || ch == '-') && cur.is_empty() {
            if ch == '-' {
                neg = !neg;
            }
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(bad("dangling sign"));
    }
    pieces.push((neg, cur));

    let mut terms = Vec::new();
    for (neg, piece) in pieces {
        let mut coeff = BigRational::one();
        let mut exps = vec![0u32; ring.nvars()];
        for factor in piece.split('*') {
            if factor.is_empty() {
                return Err(bad("empty factor"));
            }
            let first = factor.chars().next().unwrap();
            if first.is_ascii_digit() {
                coeff *= parse_rational(factor)?;
            } else {
                let (name, e) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                    None => (factor, 1),
                };
                let i = ring
                    .index_of(name)
                    .ok_or_else(|| bad(&format!("unknown variable {name}")))?;
                exps[i] += e;
            }
        }
        if neg {
            coeff = -coeff;
        }
        terms.push((Monomial(exps), coeff));
    }
    Ok(Polynomial::from_terms(ring, terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_order() {
        let ring = Ring::new(&["x", "y", "z"]);
        let m = |v: [u32; 3]| Monomial(v.to_vec());
        // degree first
        assert!(m([0, 0, 2]) > m([1, 0, 0]));
        // x^2 > xy > y^2 > xz > yz > z^2
        let order = [m([2, 0, 0]), m([1, 1, 0]), m([0, 2, 0]), m([1, 0, 1]), m([0, 1, 1]), m([0, 0, 2])];
        for w in order.windows(2) {
            assert!(w[0] > w[1], "{:?} > {:?}", w[0], w[1]);
        }
        let _ = ring;
    }

    #[test]
    fn parse_and_display_round_trip() {
        let ring = Ring::new(&["x1", "x2", "T"]);
        let p = ring.parse("x1^2*x2 - 3/2*T^3 + 1 - x1^2*x2 + x2").unwrap();
        assert_eq!(p.to_string(), "-3/2*T^3 + x2 + 1");
        assert_eq!(ring.parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn arithmetic() {
        let ring = Ring::new(&["x", "y"]);
        let x = ring.var(0);
        let y = ring.var(1);
        let s = &x + &y;
        let d = &x - &y;
        assert_eq!(&s * &d, ring.parse("x^2 - y^2").unwrap());
        assert!((&s - &s).is_zero());
        assert_eq!(s.pow(2), ring.parse("x^2 + 2*x*y + y^2").unwrap());
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let a = Ring::new(&["x"]).var(0);
        let b = Ring::new(&["y"]).var(0);
        assert!(matches!(a.try_add(&b), Err(Error::RingMismatch(_))));
    }

    #[test]
    fn homogenize_and_specialize() {
        let ring = Ring::new(&["x", "T"]);
        let p = ring.parse("x^3 + x").unwrap();
        assert_eq!(p.homogenize(1), ring.parse("x^3 + x*T^2").unwrap());
        let r1 = Ring::new(&["x"]);
        assert_eq!(
            p.homogenize(1).specialize(1, &rat(1), &r1),
            r1.parse("x^3 + x").unwrap()
        );
    }

    #[test]
    fn rational_approximation() {
        let q = approximate_rational(std::f64::consts::PI, 1000);
        assert_eq!(q, ratio(355, 113));
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert!(parse_rational("1/0").is_err());
    }
}
