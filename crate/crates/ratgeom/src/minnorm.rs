use num::{Signed, Zero};

use crate::polyhedron::VPolyhedron;
use crate::rat::{InnerProductForm, RatVec, Rational};
use crate::{RatGeomError, Result};

/// Generator cap for exact projection; subset enumeration is exponential in
/// the rank, not the generator count, but the KKT scan is quadratic and the
/// callers stay well under this bound.
pub const MAX_GENERATORS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinNorm {
    pub argmin: RatVec,
    pub sqdist: Rational,
}

/// Exact minimum-norm point of a nonempty polyhedron in the given form.
///
/// Enumerates generator subsets of size at most rank+1 (Caratheodory for the
/// homogenization: the optimum lies in a face spanned by that few generators,
/// at least one of them a point). For each subset the stationarity system is
/// solved exactly; a solution is accepted only if its coefficients are
/// feasible (alpha >= 0 summing to one, beta >= 0) and the global KKT
/// inequalities hold:
///
///   <g, p*> >= |p*|^2  for every point generator g,
///   <r, p*> >= 0       for every ray generator r,
///
/// which certify p* as the projection of the origin onto the whole set, not
/// just onto the subset's face.
pub fn min_norm_point(p: &VPolyhedron, form: &InnerProductForm) -> Result<MinNorm> {
    if p.is_empty() {
        return Err(RatGeomError::EmptyPolyhedron);
    }
    if form.rank() != p.rank() {
        return Err(RatGeomError::RankMismatch {
            expected: p.rank(),
            got: form.rank(),
        });
    }
    let n_gen = p.points().len() + p.rays().len();
    if n_gen > MAX_GENERATORS {
        return Err(RatGeomError::TooManyGenerators {
            got: n_gen,
            cap: MAX_GENERATORS,
        });
    }

    let max_size = p.rank() + 1;
    let point_subsets = subsets_up_to(p.points().len(), max_size);
    let ray_subsets = subsets_up_to(p.rays().len(), max_size);

    let mut best: Option<MinNorm> = None;
    for sp in &point_subsets {
        if sp.is_empty() {
            continue;
        }
        for sr in &ray_subsets {
            if sp.len() + sr.len() > max_size {
                continue;
            }
            let Some(candidate) = solve_subset(p, form, sp, sr) else {
                continue;
            };
            if certify(p, form, &candidate) {
                return Ok(candidate);
            }
            // Feasible but uncertified face minima are kept as a fallback;
            // with exact arithmetic the certificate always fires for the
            // optimal face, so this path only matters for debugging.
            if best
                .as_ref()
                .map(|b| candidate.sqdist < b.sqdist)
                .unwrap_or(true)
            {
                best = Some(candidate);
            }
        }
    }
    best.ok_or(RatGeomError::EmptyPolyhedron)
}

/// All index subsets of {0..n} with size <= cap, ordered by size then
/// lexicographically, so the search is deterministic and favors small faces.
fn subsets_up_to(n: usize, cap: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, size: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == size {
            out.push(prefix.clone());
            return;
        }
        let start = prefix.last().map(|&v| v + 1).unwrap_or(0);
        for i in start..n {
            prefix.push(i);
            extend(n, size, prefix, out);
            prefix.pop();
        }
    }
    let mut all: Vec<Vec<usize>> = vec![vec![]];
    for size in 1..=cap.min(n) {
        extend(n, size, &mut Vec::new(), &mut all);
    }
    all
}

/// Stationarity on the face spanned by the chosen generators:
/// x = sum alpha_i p_i + sum beta_j r_j with sum alpha = 1,
/// <p_i - p_k, x> = 0 for all i (gradient orthogonal to point differences),
/// <r_j, x> = 0 for all j (gradient orthogonal to ray directions).
/// Returns the candidate only if it is a feasible combination.
fn solve_subset(
    p: &VPolyhedron,
    form: &InnerProductForm,
    sp: &[usize],
    sr: &[usize],
) -> Option<MinNorm> {
    let k = sp.len();
    let l = sr.len();
    let pts: Vec<&RatVec> = sp.iter().map(|&i| &p.points()[i]).collect();
    let rys: Vec<&RatVec> = sr.iter().map(|&j| &p.rays()[j]).collect();

    let unknowns = k + l;
    let mut mat = Vec::with_capacity(unknowns);
    let mut rhs = Vec::with_capacity(unknowns);

    // Rows <p_i - p_last, x> = 0 for i = 0..k-1.
    for i in 0..k.saturating_sub(1) {
        let d = pts[i].sub(pts[k - 1]);
        let mut row = Vec::with_capacity(unknowns);
        for pa in &pts {
            row.push(form.pair(&d, pa));
        }
        for rb in &rys {
            row.push(form.pair(&d, rb));
        }
        mat.push(row);
        rhs.push(Rational::zero());
    }
    // Rows <r_j, x> = 0.
    for r in &rys {
        let mut row = Vec::with_capacity(unknowns);
        for pa in &pts {
            row.push(form.pair(r, pa));
        }
        for rb in &rys {
            row.push(form.pair(r, rb));
        }
        mat.push(row);
        rhs.push(Rational::zero());
    }
    // Row sum alpha = 1.
    let mut row = vec![Rational::zero(); unknowns];
    for v in row.iter_mut().take(k) {
        *v = Rational::from_integer(1.into());
    }
    mat.push(row);
    rhs.push(Rational::from_integer(1.into()));

    let sol = solve_linear(mat, rhs)?;
    if sol[..k].iter().any(|a| a.is_negative()) || sol[k..].iter().any(|b| b.is_negative()) {
        return None;
    }

    let mut x = RatVec::zero(p.rank());
    for (a, pt) in sol[..k].iter().zip(&pts) {
        x = x.add(&pt.scale(a));
    }
    for (b, r) in sol[k..].iter().zip(&rys) {
        x = x.add(&r.scale(b));
    }
    let sqdist = form.norm_sq(&x);
    Some(MinNorm { argmin: x, sqdist })
}

fn certify(p: &VPolyhedron, form: &InnerProductForm, cand: &MinNorm) -> bool {
    p.points()
        .iter()
        .all(|g| form.pair(g, &cand.argmin) >= cand.sqdist)
        && p.rays()
            .iter()
            .all(|r| !form.pair(r, &cand.argmin).is_negative())
}

/// Dense exact Gaussian elimination; `None` on a singular system.
fn solve_linear(mut mat: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    debug_assert!(mat.iter().all(|r| r.len() == n));
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let piv = mat[col][col].clone();
        for v in mat[col].iter_mut() {
            *v = &*v / &piv;
        }
        rhs[col] = &rhs[col] / &piv;
        let prow = mat[col].clone();
        for (r, row) in mat.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v = &*v - &f * p;
                }
                let delta = &f * &rhs[col];
                rhs[r] = &rhs[r] - delta;
            }
        }
    }
    Some(rhs)
}
