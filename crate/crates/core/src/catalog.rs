//! Standard fans with monotone or reflexive support numbers.

use num_rational::BigRational;

use crate::exact_algebra::rat;
use crate::lattice_fan::Fan;
use crate::polytope::MomentPolytope;

fn all_but_one(r: usize) -> Vec<Vec<usize>> {
    (0..r)
        .map(|skip| (0..r).filter(|&i| i != skip).collect())
        .collect()
}

/// `Pᵐ`: edges `e₁, …, e_m, −Σeᵢ`; every `m`-subset is a cone.
pub fn projective_space_fan(m: usize) -> Fan {
    let mut edges: Vec<Vec<i64>> = (0..m)
        .map(|i| (0..m).map(|j| i64::from(i == j)).collect())
        .collect();
    edges.push(vec![-1; m]);
    Fan::from_i64(m, &edges, &all_but_one(m + 1)).expect("projective space fan")
}

/// `Pᵐ` with `λ = (0, …, 0, −1)`; Fano index `m + 1`.
pub fn projective_space(m: usize) -> (Fan, MomentPolytope) {
    let fan = projective_space_fan(m);
    let mut l = vec![rat(0); m + 1];
    l[m] = rat(-1);
    let p = MomentPolytope::from_fan(&fan, l).expect("projective space polytope");
    (fan, p)
}

/// `Pᵐ` with every `λᵢ = −1`.
pub fn projective_space_reflexive(m: usize) -> (Fan, MomentPolytope) {
    let fan = projective_space_fan(m);
    let p = MomentPolytope::from_fan(&fan, vec![rat(-1); m + 1]).expect("reflexive polytope");
    (fan, p)
}

/// `P¹×P¹` with edge order `(1,0), (0,1), (−1,0), (0,−1)`.
pub fn p1_times_p1_fan() -> Fan {
    Fan::from_i64(
        2,
        &[vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
        &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
    )
    .expect("P1xP1 fan")
}

/// `P¹×P¹` with `λ = (0, 0, −1, −1)`; Fano index 2.
pub fn p1_times_p1() -> (Fan, MomentPolytope) {
    let fan = p1_times_p1_fan();
    let p = MomentPolytope::from_fan(&fan, vec![rat(0), rat(0), rat(-1), rat(-1)]).expect("square");
    (fan, p)
}

pub fn p1_times_p1_reflexive() -> (Fan, MomentPolytope) {
    let fan = p1_times_p1_fan();
    let p = MomentPolytope::from_fan(&fan, vec![rat(-1); 4]).expect("square");
    (fan, p)
}

/// `ℂⁿ`: standard basis edges, one cone, positive orthant.
pub fn affine_space(n: usize) -> (Fan, MomentPolytope) {
    let edges: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    let fan = Fan::from_i64(n, &edges, &[(0..n).collect()]).expect("affine fan");
    let zeros: Vec<BigRational> = vec![rat(0); n];
    let p = MomentPolytope::from_fan(&fan, zeros).expect("orthant");
    (fan, p)
}
