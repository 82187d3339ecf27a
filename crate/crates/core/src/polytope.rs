//! Moment polytopes `Δ = {y : ⟨y, eᵢ⟩ ≥ λᵢ}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{format_rational, RationalMatrix};
use crate::lattice_fan::{Fan, LatticeVector};
use crate::lp::feasible_point;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentPolytope {
    rank: usize,
    edges: Vec<LatticeVector>,
    lambdas: Vec<BigRational>,
}

impl MomentPolytope {
    pub fn new(rank: usize, edges: Vec<LatticeVector>, lambdas: Vec<BigRational>) -> Result<Self> {
        if edges.len() != lambdas.len() {
            return Err(Error::InvalidInput(format!(
                "{} edges but {} support numbers",
                edges.len(),
                lambdas.len()
            )));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.dim() != rank {
                return Err(Error::InvalidInput(format!("edge {} has wrong length", i + 1)));
            }
            if !e.is_primitive() {
                return Err(Error::InvalidInput(format!("edge {} = {e} is not primitive", i + 1)));
            }
        }
        Ok(MomentPolytope {
            rank,
            edges,
            lambdas,
        })
    }

    pub fn from_fan(fan: &Fan, lambdas: Vec<BigRational>) -> Result<Self> {
        Self::new(fan.rank(), fan.edges().to_vec(), lambdas)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn edges(&self) -> &[LatticeVector] {
        &self.edges
    }

    pub fn lambdas(&self) -> &[BigRational] {
        &self.lambdas
    }

    pub fn contains(&self, y: &[BigRational]) -> bool {
        self.edges
            .iter()
            .zip(&self.lambdas)
            .all(|(e, l)| &e.pair(y) >= l)
    }

    /// Indices of facets on which `y` is tight.
    pub fn tight_facets(&self, y: &[BigRational]) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| self.edges[i].pair(y) == self.lambdas[i])
            .collect()
    }

    pub fn is_nonempty(&self) -> bool {
        // y = y⁺ − y⁻, ⟨y, eᵢ⟩ − sᵢ = λᵢ
        let n = self.rank;
        let m = self.edges.len();
        let mut a = RationalMatrix::zeros(m, 2 * n + m);
        for (i, e) in self.edges.iter().enumerate() {
            for k in 0..n {
                let v = BigRational::from_integer(e.0[k].clone());
                a.set(i, k, v.clone());
                a.set(i, n + k, -v);
            }
            a.set(i, 2 * n + i, -BigRational::one());
        }
        feasible_point(&a, &self.lambdas).is_some()
    }

    pub fn is_bounded(&self) -> bool {
        positively_spans(&self.edges, self.rank)
    }

    /// Same polytope with `λᵢ` replaced.
    pub fn with_lambdas(&self, lambdas: Vec<BigRational>) -> Result<Self> {
        Self::new(self.rank, self.edges.clone(), lambdas)
    }

    pub fn lambda_strings(&self) -> Vec<String> {
        self.lambdas.iter().map(format_rational).collect()
    }
}

/// True iff the vectors span ℝⁿ and some strictly positive combination vanishes,
/// i.e. no nonzero `u` has `⟨u, eᵢ⟩ ≤ 0` for all `i`.
pub fn positively_spans(edges: &[LatticeVector], rank: usize) -> bool {
    let cols: Vec<Vec<BigRational>> = edges.iter().map(|e| e.to_rationals()).collect();
    let a = RationalMatrix::from_columns(&cols, rank);
    if a.rank() < rank {
        return false;
    }
    // cᵢ = 1 + dᵢ with dᵢ ≥ 0
    let b: Vec<BigRational> = (0..rank)
        .map(|k| -cols.iter().fold(BigRational::zero(), |acc, c| acc + &c[k]))
        .collect();
    feasible_point(&a, &b).is_some()
}

/// A nonzero `u` with `⟨u, eᵢ⟩ ≤ 0` for every edge, when one exists.
pub fn half_space_certificate(edges: &[LatticeVector], rank: usize) -> Option<Vec<BigRational>> {
    let cols: Vec<Vec<BigRational>> = edges.iter().map(|e| e.to_rationals()).collect();
    let a = RationalMatrix::from_columns(&cols, rank);
    if a.rank() < rank {
        return a.transpose().nullspace().into_iter().next();
    }
    // ⟨u, eᵢ⟩ + sᵢ = 0, Σ sᵢ = 1, u = u⁺ − u⁻
    let m = edges.len();
    let mut lp = RationalMatrix::zeros(m + 1, 2 * rank + m);
    let mut b = vec![BigRational::zero(); m + 1];
    for (i, c) in cols.iter().enumerate() {
        for k in 0..rank {
            lp.set(i, k, c[k].clone());
            lp.set(i, rank + k, -c[k].clone());
        }
        lp.set(i, 2 * rank + i, BigRational::one());
        lp.set(m, 2 * rank + i, BigRational::one());
    }
    b[m] = BigRational::one();
    let x = feasible_point(&lp, &b)?;
    Some((0..rank).map(|k| &x[k] - &x[rank + k]).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    pub vertices: Vec<Vec<BigRational>>,
    pub incidence: Vec<Vec<usize>>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

pub fn vertices(p: &MomentPolytope) -> Result<VertexSet> {
    if !p.is_nonempty() {
        return Err(Error::Empty);
    }
    let n = p.rank;
    let m = p.edges.len();
    let mut verts: Vec<Vec<BigRational>> = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    if n == 0 || m < n {
        return Ok(VertexSet {
            vertices: Vec::new(),
            incidence: Vec::new(),
        });
    }
    loop {
        let rows: Vec<Vec<BigRational>> = idx.iter().map(|&i| p.edges[i].to_rationals()).collect();
        let a = RationalMatrix::from_rows(rows)?;
        if a.rank() == n {
            let b: Vec<BigRational> = idx.iter().map(|&i| p.lambdas[i].clone()).collect();
            if let Some(y) = a.solve(&b) {
                if p.contains(&y) && !verts.contains(&y) {
                    verts.push(y);
                }
            }
        }
        if !next_subset(&mut idx, m) {
            break;
        }
    }
    verts.sort();
    let incidence = verts.iter().map(|v| p.tight_facets(v)).collect();
    Ok(VertexSet {
        vertices: verts,
        incidence,
    })
}

fn next_subset(idx: &mut [usize], n: usize) -> bool {
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

/// Every vertex has exactly `n` tight facets whose normals form a ℤ-basis.
pub fn is_delzant(p: &MomentPolytope) -> Result<bool> {
    let vs = vertices(p)?;
    for inc in &vs.incidence {
        if inc.len() != p.rank {
            return Ok(false);
        }
        let rows: Vec<Vec<BigRational>> = inc.iter().map(|&i| p.edges[i].to_rationals()).collect();
        let det = RationalMatrix::from_rows(rows)?.determinant()?;
        if det.abs() != BigRational::one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lattice points with every inequality strict.
pub fn interior_lattice_points(p: &MomentPolytope) -> Result<Vec<Vec<BigInt>>> {
    if !p.is_bounded() {
        return Err(Error::Unbounded);
    }
    let vs = vertices(p)?;
    let n = p.rank;
    let lo: Vec<BigInt> = (0..n)
        .map(|k| vs.vertices.iter().map(|v| v[k].floor().to_integer()).min().unwrap())
        .collect();
    let hi: Vec<BigInt> = (0..n)
        .map(|k| vs.vertices.iter().map(|v| v[k].ceil().to_integer()).max().unwrap())
        .collect();
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        let y: Vec<BigRational> = cur.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        if p.edges.iter().zip(&p.lambdas).all(|(e, l)| &e.pair(&y) > l) {
            out.push(cur.clone());
        }
        let mut k = 0;
        loop {
            if k == n {
                return Ok(out);
            }
            if cur[k] < hi[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = lo[k].clone();
            k += 1;
        }
    }
}

pub fn check_reflexive(p: &MomentPolytope) -> Result<bool> {
    if !p.is_bounded() {
        return Err(Error::Unbounded);
    }
    if p.lambdas.iter().any(|l| l != &-BigRational::one()) {
        return Ok(false);
    }
    let vs = vertices(p)?;
    if vs.vertices.iter().flatten().any(|c| !c.is_integer()) {
        return Ok(false);
    }
    let inner = interior_lattice_points(p)?;
    Ok(inner.len() == 1 && inner[0].iter().all(|c| c.is_zero()))
}

/// Translate vertex `v` to the origin and divide by the largest integer `d`
/// keeping vertices and support numbers integral. Returns the polytope and `d`.
pub fn normalize_monotone(p: &MomentPolytope, v: &[BigRational]) -> Result<(MomentPolytope, u64)> {
    if v.len() != p.rank || !p.contains(v) {
        return Err(Error::InvalidInput("normalisation point is not in the polytope".into()));
    }
    let vs = vertices(p)?;
    if !vs.vertices.iter().any(|w| w.as_slice() == v) {
        return Err(Error::InvalidInput("normalisation point is not a vertex".into()));
    }
    let shifted: Vec<BigRational> = p
        .edges
        .iter()
        .zip(&p.lambdas)
        .map(|(e, l)| l - e.pair(v))
        .collect();
    let mut values: Vec<&BigRational> = shifted.iter().collect();
    let diffs: Vec<BigRational> = vs
        .vertices
        .iter()
        .flat_map(|w| w.iter().zip(v).map(|(a, b)| a - b).collect::<Vec<_>>())
        .collect();
    values.extend(diffs.iter());
    if values.iter().any(|x| !x.is_integer()) {
        return Err(Error::DivisibilityFails(
            "translated polytope is not integral".into(),
        ));
    }
    let g = values
        .iter()
        .fold(BigInt::zero(), |g, x| g.gcd(&x.to_integer()));
    let d = if g.is_zero() { BigInt::one() } else { g };
    let dq = BigRational::from_integer(d.clone());
    let lambdas = shifted.iter().map(|l| l / &dq).collect();
    let out = MomentPolytope::new(p.rank, p.edges.clone(), lambdas)?;
    let d = d
        .to_u64()
        .ok_or_else(|| Error::DivisibilityFails("index does not fit in 64 bits".into()))?;
    Ok((out, d))
}

/// Unique `y` with `⟨y, eᵢ⟩ = λᵢ + 1/λ_X` for all `i`.
pub fn barycentre(p: &MomentPolytope, lambda_x: u64) -> Result<Vec<BigRational>> {
    if lambda_x == 0 {
        return Err(Error::InvalidInput("index must be positive".into()));
    }
    let shift = BigRational::new(BigInt::one(), BigInt::from(lambda_x));
    let rows: Vec<Vec<BigRational>> = p.edges.iter().map(|e| e.to_rationals()).collect();
    let a = RationalMatrix::from_rows(rows)?;
    let b: Vec<BigRational> = p.lambdas.iter().map(|l| l + &shift).collect();
    let y = a.solve(&b).ok_or_else(|| {
        Error::Inconsistent(format!(
            "no point is at lattice distance 1/{lambda_x} from every facet"
        ))
    })?;
    if a.rank() < p.rank {
        return Err(Error::Inconsistent("solution is not unique".into()));
    }
    Ok(y)
}

/// Add the facet `⟨y, Σ_I eᵢ⟩ ≥ ε + Σ_I λᵢ`.
pub fn chop(p: &MomentPolytope, set: &[usize], epsilon: &BigRational) -> Result<MomentPolytope> {
    if set.is_empty() || set.iter().any(|&i| i >= p.edges.len()) {
        return Err(Error::InvalidInput("chop needs facet indices".into()));
    }
    if !epsilon.is_positive() {
        return Err(Error::InvalidInput("chop depth must be positive".into()));
    }
    let mut e0 = LatticeVector::zero(p.rank);
    let mut l0 = epsilon.clone();
    for &i in set {
        e0 = e0.add(&p.edges[i]);
        l0 += &p.lambdas[i];
    }
    if !e0.is_primitive() {
        return Err(Error::InvalidInput(format!("new normal {e0} is not primitive")));
    }
    let vs = vertices(p)?;
    let on_face = |inc: &Vec<usize>| set.iter().all(|i| inc.contains(i));
    if !vs.incidence.iter().any(on_face) {
        return Err(Error::NotAFace(set.iter().map(|i| i + 1).collect()));
    }
    for (v, inc) in vs.vertices.iter().zip(&vs.incidence) {
        if !on_face(inc) && e0.pair(v) <= l0 {
            let pretty: Vec<String> = v.iter().map(format_rational).collect();
            return Err(Error::ChopTooDeep(format!(
                "vertex ({}) off the chopped face is cut",
                pretty.join(",")
            )));
        }
    }
    let mut edges = p.edges.clone();
    edges.push(e0);
    let mut lambdas = p.lambdas.clone();
    lambdas.push(l0);
    MomentPolytope::new(p.rank, edges, lambdas)
}
