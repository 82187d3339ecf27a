//! Fixtures shared by the benchmarks.

use torfan_core::bundle_blowup::nlb_from_k;
use torfan_core::catalog;
use torfan_core::{Fan, MatrixFamily, MomentPolytope};

/// `O(−k) → Pᵐ` with its normalised polytope.
pub fn bundle_over_projective(m: usize, k: u64) -> (Fan, MomentPolytope) {
    let (b, pb) = catalog::projective_space(m);
    let (e, pe, _) = nlb_from_k(&b, &pb, k).expect("monotone bundle");
    (e, pe)
}

/// `[[x, 1], [0, 0]]`
pub fn exceptional_family() -> MatrixFamily {
    MatrixFamily::from_real(&[vec![vec![0.0, 1.0], vec![1.0]], vec![vec![0.0], vec![0.0]]])
        .expect("2x2 family")
}
