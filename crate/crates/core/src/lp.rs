//! Exact phase-I simplex over the rationals (Bland's rule, so it terminates).

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact_algebra::RationalMatrix;

/// A point `x ≥ 0` with `A x = b`, or `None` when no such point exists.
pub(crate) fn feasible_point(a: &RationalMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = a.nrows();
    let n = a.ncols();
    assert_eq!(b.len(), m);
    // tableau columns: n originals, m artificials, rhs
    let width = n + m + 1;
    let mut t: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let flip = b[i].is_negative();
            let sign = |v: &BigRational| if flip { -v.clone() } else { v.clone() };
            let mut row: Vec<BigRational> = (0..n).map(|j| sign(a.get(i, j))).collect();
            row.extend((0..m).map(|k| if k == i { BigRational::one() } else { BigRational::zero() }));
            row.push(sign(&b[i]));
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // reduced costs of the phase-I objective (minimise the sum of artificials)
    let mut cost: Vec<BigRational> = vec![BigRational::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }
    loop {
        let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            // phase-I objective is bounded below by 0, so this cannot happen
            unreachable!("unbounded phase-I direction");
        };
        pivot(&mut t, &mut cost, r, enter);
        basis[r] = enter;
    }
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<BigRational>], cost: &mut [BigRational], r: usize, c: usize) {
    let inv = t[r][c].recip();
    for v in t[r].iter_mut() {
        *v *= &inv;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                *v -= &f * p;
            }
        }
    }
    if !cost[c].is_zero() {
        let f = cost[c].clone();
        for (v, p) in cost.iter_mut().zip(&prow) {
            *v -= &f * p;
        }
    }
}
