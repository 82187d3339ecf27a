//! Fan and polytope surgery: total spaces of line bundles and toric blow-ups.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{format_rational, groebner_basis, normal_form, rat, Polynomial, Ring};
use crate::lattice_fan::{validate_fan, Fan, LatticeVector};
use crate::polytope::{chop, MomentPolytope};

/// `E = O(Σ nᵢ Dᵢ)` over a base with index `λ_B`; `λ_E = λ_B − k` when built from `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineBundleSpec {
    pub n: Vec<i64>,
    pub k: Option<u64>,
    pub lambda_b: Option<u64>,
    pub lambda_e: Option<i64>,
}

impl LineBundleSpec {
    pub fn from_degrees(n: Vec<i64>) -> Self {
        LineBundleSpec {
            n,
            k: None,
            lambda_b: None,
            lambda_e: None,
        }
    }
}

/// Edges `(bᵢ, −nᵢ)` and `(0, …, 0, 1)`; each base cone gains the fibre edge.
pub fn line_bundle_fan(base: &Fan, spec: &LineBundleSpec) -> Result<Fan> {
    if spec.n.len() != base.num_edges() {
        return Err(Error::InvalidInput(format!(
            "bundle has {} degrees for {} divisors",
            spec.n.len(),
            base.num_edges()
        )));
    }
    let report = validate_fan(base)?;
    if !report.smooth || !report.complete {
        return Err(Error::InvalidInput("line bundle base must be smooth and complete".into()));
    }
    let n = base.rank();
    let mut edges: Vec<LatticeVector> = base
        .edges()
        .iter()
        .zip(&spec.n)
        .map(|(b, &ni)| {
            let mut c = b.0.clone();
            c.push(BigInt::from(-ni));
            LatticeVector(c)
        })
        .collect();
    let mut fibre = vec![BigInt::zero(); n + 1];
    fibre[n] = BigInt::from(1);
    edges.push(LatticeVector(fibre));
    let f = base.num_edges();
    let cones = base
        .max_cones()
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.push(f);
            c
        })
        .collect();
    Fan::new(n + 1, edges, cones)
}

/// Monotone negative line bundle `O(k Σ λᵢ Dᵢ)` over a normalised monotone base.
pub fn nlb_from_k(
    base: &Fan,
    base_polytope: &MomentPolytope,
    k: u64,
) -> Result<(Fan, MomentPolytope, LineBundleSpec)> {
    let lambda_b = base
        .fano_index()
        .ok_or_else(|| Error::InvalidInput("base has no positive Fano index".into()))?;
    if k == 0 || k >= lambda_b {
        return Err(Error::NotMonotone(format!(
            "k = {k} outside 1..={}",
            lambda_b - 1
        )));
    }
    let mut n = Vec::with_capacity(base.num_edges());
    for l in base_polytope.lambdas() {
        if !l.is_integer() {
            return Err(Error::InvalidInput(format!(
                "base support number {} is not an integer",
                format_rational(l)
            )));
        }
        n.push(l.to_integer().to_i64().expect("small support number") * k as i64);
    }
    assert_c1_identity(base, &n, k, lambda_b)?;
    let spec = LineBundleSpec {
        n,
        k: Some(k),
        lambda_b: Some(lambda_b),
        lambda_e: Some(lambda_b as i64 - k as i64),
    };
    let fan = line_bundle_fan(base, &spec)?;
    let mut lambdas = base_polytope.lambdas().to_vec();
    lambdas.push(rat(0));
    let polytope = MomentPolytope::from_fan(&fan, lambdas)?;
    Ok((fan, polytope, spec))
}

/// `Σ nᵢ xᵢ ≡ −(k/λ_B) Σ xᵢ` modulo the linear relations of the base.
fn assert_c1_identity(base: &Fan, n: &[i64], k: u64, lambda_b: u64) -> Result<()> {
    let r = base.num_edges();
    let names: Vec<String> = (1..=r).map(|i| format!("x{i}")).collect();
    let ring = Ring::new(&names);
    let linear: Vec<Polynomial> = (0..base.rank())
        .map(|a| {
            let mut p = ring.zero();
            for (i, e) in base.edges().iter().enumerate() {
                let c = BigRational::from_integer(e.0[a].clone());
                p = &p + &ring.var(i).scale(&c);
            }
            p
        })
        .collect();
    let g = groebner_basis(&ring, &linear)?;
    let factor = BigRational::new(BigInt::from(k), BigInt::from(lambda_b));
    let mut diff = ring.zero();
    for i in 0..r {
        let c = rat(n[i]) + &factor;
        diff = &diff + &ring.var(i).scale(&c);
    }
    if !normal_form(&diff, &g)?.is_zero() {
        return Err(Error::Inconsistent(
            "bundle degrees do not give c1(E) = -(k/lambda_B) sum x_i".into(),
        ));
    }
    Ok(())
}

/// Result of a blow-up. `warnings` is non-empty when the chop depth is not the
/// monotone one for reflexive data.
#[derive(Clone, Debug)]
pub struct Surgery {
    pub fan: Fan,
    pub polytope: MomentPolytope,
    /// 0-based index of the exceptional divisor's edge (always the last one).
    pub new_edge: usize,
    pub warnings: Vec<String>,
}

pub fn blowup_face(
    fan: &Fan,
    polytope: &MomentPolytope,
    set: &[usize],
    epsilon: &BigRational,
) -> Result<Surgery> {
    let mut set: Vec<usize> = set.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.len() < 2 || !fan.is_cone(&set) {
        return Err(Error::NotAFace(set.iter().map(|i| i + 1).collect()));
    }
    let mut e0 = LatticeVector::zero(fan.rank());
    for &i in &set {
        e0 = e0.add(&fan.edges()[i]);
    }
    let new = fan.num_edges();
    let mut cones = Vec::new();
    for c in fan.max_cones() {
        if set.iter().all(|i| c.contains(i)) {
            for &drop in &set {
                let mut nc: Vec<usize> = c.iter().copied().filter(|&x| x != drop).collect();
                nc.push(new);
                cones.push(nc);
            }
        } else {
            cones.push(c.clone());
        }
    }
    let mut edges = fan.edges().to_vec();
    edges.push(e0);
    let new_fan = Fan::new(fan.rank(), edges, cones)?;
    let new_polytope = chop(polytope, &set, epsilon)?;
    let mut warnings = Vec::new();
    let reflexive_data = polytope.lambdas().iter().all(|l| l == &rat(-1));
    let monotone_eps = rat(set.len() as i64 - 1);
    if !reflexive_data || epsilon != &monotone_eps {
        warnings.push(format!(
            "chop depth {} is not the monotone value {} for reflexive data",
            format_rational(epsilon),
            set.len() - 1
        ));
    }
    Ok(Surgery {
        fan: new_fan,
        polytope: new_polytope,
        new_edge: new,
        warnings,
    })
}

/// Blow up the fixed point of a full-dimensional cone.
pub fn blowup_point(
    fan: &Fan,
    polytope: &MomentPolytope,
    cone: usize,
    epsilon: &BigRational,
) -> Result<Surgery> {
    let c = fan
        .max_cones()
        .get(cone)
        .ok_or_else(|| Error::InvalidInput(format!("no cone {}", cone + 1)))?;
    if c.len() != fan.rank() {
        return Err(Error::NotAFace(c.iter().map(|i| i + 1).collect()));
    }
    blowup_face(fan, polytope, &c.clone(), epsilon)
}

/// Point blow-up with `ε = n − 1`.
pub fn blowup_point_monotone(fan: &Fan, polytope: &MomentPolytope, cone: usize) -> Result<Surgery> {
    blowup_point(fan, polytope, cone, &rat(fan.rank() as i64 - 1))
}

/// Face blow-up with `ε = |I| − 1`.
pub fn blowup_face_monotone(fan: &Fan, polytope: &MomentPolytope, set: &[usize]) -> Result<Surgery> {
    blowup_face(fan, polytope, set, &rat(set.len() as i64 - 1))
}
