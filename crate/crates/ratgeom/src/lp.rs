use num::{Signed, Zero};

use crate::rat::{RatVec, Rational};

/// Decides feasibility of `sum_j x_j col_j = b` with `x >= 0`, exactly.
///
/// Phase-1 simplex on rationals. Bland's rule (lowest eligible index for both
/// the entering and the leaving variable) rules out cycling, so termination
/// is unconditional. Returns a witness `x` on success.
pub fn nonneg_solve(cols: &[RatVec], b: &RatVec) -> Option<Vec<Rational>> {
    let m = b.dim();
    let n = cols.len();
    debug_assert!(cols.iter().all(|c| c.dim() == m));

    // Tableau rows: [original columns | artificial identity | rhs], with the
    // rhs made nonnegative up front so the artificial basis is feasible.
    let width = n + m + 1;
    let mut t = vec![vec![Rational::zero(); width]; m];
    for (i, row) in t.iter_mut().enumerate() {
        let flip = b.coords[i].is_negative();
        for (j, col) in cols.iter().enumerate() {
            row[j] = if flip {
                -col.coords[i].clone()
            } else {
                col.coords[i].clone()
            };
        }
        row[n + i] = Rational::from_integer(1.into());
        row[width - 1] = if flip {
            -b.coords[i].clone()
        } else {
            b.coords[i].clone()
        };
    }

    // Objective: minimize the sum of artificials. Reduced-cost row starts as
    // -(sum of constraint rows) over the original columns.
    let mut cost = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }

    let mut basis: Vec<usize> = (n..n + m).collect();
    // Entering: lowest index with a negative reduced cost.
    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        // Leaving: minimum ratio, ties broken by the lowest basic variable.
        let mut pick: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &pick {
                    None => true,
                    Some((pi, pr)) => ratio < *pr || (ratio == *pr && basis[i] < basis[*pi]),
                };
                if better {
                    pick = Some((i, ratio));
                }
            }
        }
        let (leave, _) = pick?; // unbounded cannot happen in phase 1
        let pivot = t[leave][enter].clone();
        for v in t[leave].iter_mut() {
            *v = &*v / &pivot;
        }
        let prow = t[leave].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != leave && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v = &*v - &f * p;
                }
            }
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for (c, p) in cost.iter_mut().zip(&prow) {
                *c = &*c - &f * p;
            }
        }
        basis[leave] = enter;
    }

    // Feasible iff the artificial objective reaches zero (the stored value is
    // its negation).
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

/// Exact membership of `v` in the cone generated by `rays`.
pub fn in_cone(rays: &[RatVec], v: &RatVec) -> bool {
    if v.is_zero() {
        return true;
    }
    if rays.is_empty() {
        return false;
    }
    nonneg_solve(rays, v).is_some()
}
