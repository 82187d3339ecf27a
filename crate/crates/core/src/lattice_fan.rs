//! Smooth simplicial fans: validation, primitive collections and the linear
//! relations among edges that define curve classes.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{integer_kernel, RationalMatrix};
use crate::lp::feasible_point;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub Vec<BigInt>);

impl LatticeVector {
    pub fn from_i64(v: &[i64]) -> Self {
        LatticeVector(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(n: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn is_primitive(&self) -> bool {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one()
    }

    pub fn add(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        LatticeVector(self.0.iter().map(|a| a * k).collect())
    }

    /// `⟨y, self⟩` for a rational point `y`.
    pub fn pair(&self, y: &[BigRational]) -> BigRational {
        self.0
            .iter()
            .zip(y)
            .fold(BigRational::zero(), |acc, (a, b)| acc + BigRational::from_integer(a.clone()) * b)
    }

    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.0.iter().map(|a| BigRational::from_integer(a.clone())).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|a| a.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|a| a.to_i64()).collect()
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Simplicial fan stored by its maximal cones (sorted 0-based edge indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    rank: usize,
    edges: Vec<LatticeVector>,
    max_cones: Vec<Vec<usize>>,
}

impl Fan {
    /// Structural checks only: lengths, index bounds, primitive edges, independent cones.
    pub fn new(rank: usize, edges: Vec<LatticeVector>, max_cones: Vec<Vec<usize>>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.dim() != rank {
                return Err(Error::InvalidInput(format!(
                    "edge {} has {} coordinates, expected {rank}",
                    i + 1,
                    e.dim()
                )));
            }
            if !e.is_primitive() {
                return Err(Error::InvalidInput(format!("edge {} = {e} is not primitive", i + 1)));
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for cone in max_cones {
            let set: BTreeSet<usize> = cone.iter().copied().collect();
            if set.len() != cone.len() {
                return Err(Error::InvalidInput(format!("cone {cone:?} repeats an edge")));
            }
            if let Some(&bad) = set.iter().find(|&&i| i >= edges.len()) {
                return Err(Error::InvalidInput(format!("cone index {} out of range", bad + 1)));
            }
            let sorted: Vec<usize> = set.into_iter().collect();
            let m = edge_matrix(&edges, &sorted, rank);
            if m.rank() != sorted.len() {
                return Err(Error::InvalidInput(format!(
                    "cone {:?} has linearly dependent edges",
                    sorted.iter().map(|i| i + 1).collect::<Vec<_>>()
                )));
            }
            cones.push(sorted);
        }
        Ok(Fan {
            rank,
            edges,
            max_cones: cones,
        })
    }

    pub fn from_i64(rank: usize, edges: &[Vec<i64>], max_cones: &[Vec<usize>]) -> Result<Self> {
        Self::new(
            rank,
            edges.iter().map(|e| LatticeVector::from_i64(e)).collect(),
            max_cones.to_vec(),
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn edges(&self) -> &[LatticeVector] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// True when the index set spans a cone of the fan (a face of a maximal cone).
    pub fn is_cone(&self, set: &[usize]) -> bool {
        self.max_cones
            .iter()
            .any(|c| set.iter().all(|i| c.contains(i)))
    }

    /// Coefficients of `v` in the edges of `cone`, if `v` lies in the cone.
    pub fn cone_coordinates(&self, cone: &[usize], v: &LatticeVector) -> Option<Vec<BigRational>> {
        let m = edge_matrix(&self.edges, cone, self.rank);
        let x = m.solve(&v.to_rationals())?;
        if x.iter().any(|c| c.is_negative()) {
            return None;
        }
        Some(x)
    }

    /// Apply an integer matrix to every edge (`e ↦ A e`).
    pub fn transform(&self, a: &[Vec<i64>]) -> Result<Fan> {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                LatticeVector(
                    a.iter()
                        .map(|row| {
                            row.iter()
                                .zip(&e.0)
                                .fold(BigInt::zero(), |acc, (r, x)| acc + BigInt::from(*r) * x)
                        })
                        .collect(),
                )
            })
            .collect();
        Fan::new(self.rank, edges, self.max_cones.clone())
    }

    /// Integer basis of the relation lattice `{n : Σ nᵢ eᵢ = 0}`.
    pub fn relation_lattice(&self) -> Vec<Vec<BigInt>> {
        let rows: Vec<Vec<BigInt>> = (0..self.rank)
            .map(|k| self.edges.iter().map(|e| e.0[k].clone()).collect())
            .collect();
        integer_kernel(&rows, self.edges.len())
    }

    /// Positive generator of `{Σ nᵢ : Σ nᵢ eᵢ = 0}`; `None` without relations or
    /// when every relation has `Σ nᵢ = 0`.
    pub fn fano_index(&self) -> Option<u64> {
        let g = self
            .relation_lattice()
            .iter()
            .map(|v| v.iter().fold(BigInt::zero(), |a, b| a + b))
            .fold(BigInt::zero(), |g, s| g.gcd(&s));
        g.to_u64().filter(|&x| x > 0)
    }
}

pub(crate) fn edge_matrix(edges: &[LatticeVector], cone: &[usize], rank: usize) -> RationalMatrix {
    let cols: Vec<Vec<BigRational>> = cone.iter().map(|&i| edges[i].to_rationals()).collect();
    RationalMatrix::from_columns(&cols, rank)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanReport {
    pub smooth: bool,
    pub complete: bool,
    pub notes: Vec<String>,
}

pub fn validate_fan(fan: &Fan) -> Result<FanReport> {
    let mut notes = Vec::new();
    for (a, b) in pairs(fan.max_cones.len()) {
        if !meet_in_face(fan, &fan.max_cones[a], &fan.max_cones[b]) {
            return Err(Error::OverlappingCones(
                one_based(&fan.max_cones[a]),
                one_based(&fan.max_cones[b]),
            ));
        }
    }
    let mut smooth = true;
    for cone in &fan.max_cones {
        if !unimodular(fan, cone) {
            smooth = false;
            notes.push(format!(
                "cone {:?} does not extend to a lattice basis",
                one_based(cone)
            ));
        }
    }
    let complete = ridge_complete(fan, &mut notes);
    Ok(FanReport {
        smooth,
        complete,
        notes,
    })
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

/// Separating functional: zero on the shared edges, positive on the rest of
/// `s`, negative on the rest of `t`. Exists iff the cones meet in their common face.
fn meet_in_face(fan: &Fan, s: &[usize], t: &[usize]) -> bool {
    let n = fan.rank;
    let shared: Vec<usize> = s.iter().filter(|i| t.contains(i)).copied().collect();
    let only_s: Vec<usize> = s.iter().filter(|i| !t.contains(i)).copied().collect();
    let only_t: Vec<usize> = t.iter().filter(|i| !s.contains(i)).copied().collect();
    let rows = shared.len() + only_s.len() + only_t.len();
    let slack = only_s.len() + only_t.len();
    let mut a = RationalMatrix::zeros(rows, 2 * n + slack);
    let mut b = Vec::with_capacity(rows);
    let mut r = 0;
    let put = |a: &mut RationalMatrix, r: usize, e: &LatticeVector| {
        for k in 0..n {
            let v = BigRational::from_integer(e.0[k].clone());
            a.set(r, k, v.clone());
            a.set(r, n + k, -v);
        }
    };
    for &i in &shared {
        put(&mut a, r, &fan.edges[i]);
        b.push(BigRational::zero());
        r += 1;
    }
    for (k, &i) in only_s.iter().enumerate() {
        put(&mut a, r, &fan.edges[i]);
        a.set(r, 2 * n + k, -BigRational::one());
        b.push(BigRational::one());
        r += 1;
    }
    for (k, &i) in only_t.iter().enumerate() {
        put(&mut a, r, &fan.edges[i]);
        a.set(r, 2 * n + only_s.len() + k, BigRational::one());
        b.push(-BigRational::one());
        r += 1;
    }
    feasible_point(&a, &b).is_some()
}

/// Edges of the cone extend to a ℤ-basis iff the gcd of maximal minors is 1.
fn unimodular(fan: &Fan, cone: &[usize]) -> bool {
    let k = cone.len();
    if k == 0 {
        return true;
    }
    let mut g = BigInt::zero();
    for rows in subsets(fan.rank, k) {
        let mut m = RationalMatrix::zeros(k, k);
        for (a, &row) in rows.iter().enumerate() {
            for (b, &e) in cone.iter().enumerate() {
                m.set(a, b, BigRational::from_integer(fan.edges[e].0[row].clone()));
            }
        }
        let det = m.determinant().expect("square minor").to_integer();
        g = g.gcd(&det);
        if g.is_one() {
            return true;
        }
    }
    g.is_one()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Pure full-dimensional, every ridge in exactly two cones, ridge-connected.
fn ridge_complete(fan: &Fan, notes: &mut Vec<String>) -> bool {
    let n = fan.rank;
    if fan.max_cones.is_empty() {
        notes.push("fan has no cones".into());
        return n == 0;
    }
    if fan.max_cones.iter().any(|c| c.len() != n) {
        notes.push("not all maximal cones are full-dimensional".into());
        return false;
    }
    let mut ridges: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ci, c) in fan.max_cones.iter().enumerate() {
        for drop in 0..c.len() {
            let mut r = c.clone();
            r.remove(drop);
            ridges.entry(r).or_default().push(ci);
        }
    }
    if let Some((r, _)) = ridges.iter().find(|(_, owners)| owners.len() != 2) {
        notes.push(format!("ridge {:?} is not shared by exactly two cones", one_based(r)));
        return false;
    }
    let mut seen = vec![false; fan.max_cones.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(c) = stack.pop() {
        for owners in ridges.values() {
            if owners.contains(&c) {
                for &o in owners {
                    if !seen[o] {
                        seen[o] = true;
                        stack.push(o);
                    }
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        notes.push("cones are not connected through ridges".into());
        return false;
    }
    true
}

/// Minimal index sets that span no cone, found by increasing size.
pub fn primitive_collections(fan: &Fan) -> Vec<Vec<usize>> {
    let r = fan.num_edges();
    let mut faces: HashSet<Vec<usize>> = HashSet::new();
    for c in &fan.max_cones {
        for k in 0..=c.len() {
            for s in subsets(c.len(), k) {
                faces.insert(s.iter().map(|&i| c[i]).collect());
            }
        }
    }
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    while !layer.is_empty() {
        let mut next = Vec::new();
        for f in &layer {
            let start = f.last().map(|&x| x + 1).unwrap_or(0);
            for j in start..r {
                let mut cand = f.clone();
                cand.push(j);
                let all_faces = (0..cand.len()).all(|d| {
                    let mut s = cand.clone();
                    s.remove(d);
                    faces.contains(&s)
                });
                if !all_faces {
                    continue;
                }
                if faces.contains(&cand) {
                    next.push(cand);
                } else {
                    out.push(cand);
                }
            }
        }
        layer = next;
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// A curve class read off a linear relation among edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveClass {
    pub intersections: Vec<i64>,
    pub c1: i64,
    /// `−Σ λᵢ nᵢ`, present when support numbers were supplied.
    pub omega: Option<BigRational>,
}

impl CurveClass {
    pub fn with_omega(mut self, lambdas: &[BigRational]) -> Self {
        self.omega = Some(omega_of(&self.intersections, lambdas));
        self
    }
}

fn omega_of(n: &[i64], lambdas: &[BigRational]) -> BigRational {
    -n.iter()
        .zip(lambdas)
        .fold(BigRational::zero(), |acc, (&k, l)| acc + l * BigRational::from_integer(k.into()))
}

/// `Σ_{i∈I} eᵢ = Σ c_q e_{j_q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveRelation {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub c: Vec<i64>,
    pub class: CurveClass,
}

pub fn batyrev_decompose(fan: &Fan, set: &[usize]) -> Result<PrimitiveRelation> {
    let mut v = LatticeVector::zero(fan.rank);
    for &i in set {
        v = v.add(&fan.edges[i]);
    }
    for cone in &fan.max_cones {
        let Some(x) = fan.cone_coordinates(cone, &v) else {
            continue;
        };
        let mut j = Vec::new();
        let mut c = Vec::new();
        for (k, coeff) in x.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            if !coeff.is_integer() {
                return Err(Error::InvalidInput(format!(
                    "non-integral decomposition of edge sum {v}: fan is not smooth"
                )));
            }
            j.push(cone[k]);
            c.push(coeff.to_integer().to_i64().expect("small coefficient"));
        }
        let mut n = vec![0i64; fan.num_edges()];
        for &i in set {
            n[i] += 1;
        }
        for (&jq, &cq) in j.iter().zip(&c) {
            n[jq] -= cq;
        }
        let c1 = n.iter().sum();
        return Ok(PrimitiveRelation {
            i: set.to_vec(),
            j,
            c,
            class: CurveClass {
                intersections: n,
                c1,
                omega: None,
            },
        });
    }
    Err(Error::NoConeContains(one_based(set)))
}

pub fn relation_class(fan: &Fan, n: &[i64], lambdas: &[BigRational]) -> Result<CurveClass> {
    if n.len() != fan.num_edges() || lambdas.len() != fan.num_edges() {
        return Err(Error::InvalidInput("relation length does not match edge count".into()));
    }
    let mut sum = LatticeVector::zero(fan.rank);
    for (e, &k) in fan.edges.iter().zip(n) {
        sum = sum.add(&e.scale(&BigInt::from(k)));
    }
    if !sum.is_zero() {
        return Err(Error::RelationFails(format!("Σ nᵢ eᵢ = {sum}")));
    }
    Ok(CurveClass {
        intersections: n.to_vec(),
        c1: n.iter().sum(),
        omega: Some(omega_of(n, lambdas)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat;

    fn plane() -> Fan {
        Fan::from_i64(2, &[vec![1, 0], vec![0, 1], vec![-1, -1]], &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn plane_is_smooth_complete() {
        let r = validate_fan(&plane()).unwrap();
        assert!(r.smooth && r.complete);
        assert_eq!(primitive_collections(&plane()), vec![vec![0, 1, 2]]);
        let rel = batyrev_decompose(&plane(), &[0, 1, 2]).unwrap();
        assert!(rel.j.is_empty());
        assert_eq!(rel.class.intersections, vec![1, 1, 1]);
        assert_eq!(rel.class.c1, 3);
        assert_eq!(plane().fano_index(), Some(3));
    }

    #[test]
    fn product_of_lines() {
        let f = Fan::from_i64(
            2,
            &[vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
            &[vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
        )
        .unwrap();
        assert_eq!(primitive_collections(&f), vec![vec![0, 1], vec![2, 3]]);
        let rel = batyrev_decompose(&f, &[0, 1]).unwrap();
        assert_eq!(rel.class.intersections, vec![1, 1, 0, 0]);
        assert_eq!(rel.class.c1, 2);
        assert_eq!(f.fano_index(), Some(2));
    }

    #[test]
    fn non_smooth_cone() {
        let f = Fan::from_i64(2, &[vec![1, 0], vec![1, 2]], &[vec![0, 1]]).unwrap();
        let r = validate_fan(&f).unwrap();
        assert!(!r.smooth);
        assert!(!r.complete);
    }

    #[test]
    fn overlapping_cones_rejected() {
        let f = Fan::from_i64(2, &[vec![1, 0], vec![0, 1], vec![1, 1]], &[vec![0, 1], vec![0, 2]]).unwrap();
        assert!(matches!(validate_fan(&f), Err(Error::OverlappingCones(_, _))));
    }

    #[test]
    fn relation_classes() {
        let l = vec![rat(0), rat(0), rat(-1)];
        let c = relation_class(&plane(), &[1, 1, 1], &l).unwrap();
        assert_eq!(c.c1, 3);
        assert_eq!(c.omega, Some(rat(1)));
        let z = relation_class(&plane(), &[0, 0, 0], &l).unwrap();
        assert_eq!(z.c1, 0);
        assert!(matches!(relation_class(&plane(), &[1, 0, 0], &l), Err(Error::RelationFails(_))));
    }

    #[test]
    fn non_primitive_edge_rejected() {
        assert!(Fan::from_i64(2, &[vec![2, 4]], &[vec![0]]).is_err());
    }
}
