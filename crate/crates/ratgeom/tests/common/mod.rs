// Shared by several test targets; not every target uses every helper.
#![allow(dead_code)]

use num::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use ratgeom::{rat, InnerProductForm, RatVec, Rational, VPolyhedron};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_ratvec(rng: &mut ChaCha20Rng, dim: usize) -> RatVec {
    RatVec::new(
        (0..dim)
            .map(|_| rat(rng.gen_range(-8..=8), rng.gen_range(1..=3)))
            .collect(),
    )
}

pub fn random_polyhedron(rng: &mut ChaCha20Rng, rank: usize) -> VPolyhedron {
    let n_pts = rng.gen_range(1..=5);
    let n_rays = rng.gen_range(0..=3);
    let points = (0..n_pts).map(|_| random_ratvec(rng, rank)).collect();
    let rays = (0..n_rays)
        .map(|_| loop {
            let r = random_ratvec(rng, rank);
            if !r.is_zero() {
                return r;
            }
        })
        .collect();
    VPolyhedron::new(rank, points, rays).expect("random generators are valid")
}

/// Independent minimum-norm oracle: exhaustive face scan via normal
/// equations (affine parametrization), global minimum over all feasible
/// stationary points and vertices. No KKT certificate involved, so this
/// shares no decision logic with the production projection.
pub fn oracle_min_norm(p: &VPolyhedron, form: &InnerProductForm) -> (RatVec, Rational) {
    assert!(!p.is_empty());
    let rank = p.rank();
    let mut best: Option<(RatVec, Rational)> = None;
    let mut consider = |x: RatVec, sq: Rational| {
        if best.as_ref().is_none_or(|(_, b)| sq < *b) {
            best = Some((x, sq));
        }
    };

    let pts = p.points();
    let rays = p.rays();
    for pmask in 1u32..(1 << pts.len()) {
        let sel_p: Vec<&RatVec> = (0..pts.len())
            .filter(|i| pmask & (1 << i) != 0)
            .map(|i| &pts[i])
            .collect();
        for rmask in 0u32..(1 << rays.len()) {
            let sel_r: Vec<&RatVec> = (0..rays.len())
                .filter(|j| rmask & (1 << j) != 0)
                .map(|j| &rays[j])
                .collect();
            if sel_p.len() + sel_r.len() > rank + 2 {
                // Larger families only repeat faces already scanned.
                continue;
            }
            // x = p0 + sum s_i (p_i - p0) + sum t_j r_j.
            let p0 = sel_p[0];
            let mut dirs: Vec<RatVec> = sel_p[1..].iter().map(|pi| pi.sub(p0)).collect();
            dirs.extend(sel_r.iter().map(|r| (*r).clone()));
            if dirs.is_empty() {
                consider(p0.clone(), form.norm_sq(p0));
                continue;
            }
            let n = dirs.len();
            let mut mat = vec![vec![Rational::zero(); n]; n];
            let mut rhs = vec![Rational::zero(); n];
            for i in 0..n {
                for j in 0..n {
                    mat[i][j] = form.pair(&dirs[i], &dirs[j]);
                }
                rhs[i] = -form.pair(&dirs[i], p0);
            }
            let Some(sol) = gauss(mat, rhs) else {
                continue;
            };
            let k = sel_p.len() - 1;
            let s_ok = sol[..k].iter().all(|s| !s.is_negative())
                && sol[..k].iter().sum::<Rational>() <= Rational::from_integer(1.into());
            let t_ok = sol[k..].iter().all(|t| !t.is_negative());
            if !(s_ok && t_ok) {
                continue;
            }
            let mut x = p0.clone();
            for (c, d) in sol.iter().zip(&dirs) {
                x = x.add(&d.scale(c));
            }
            let sq = form.norm_sq(&x);
            consider(x, sq);
        }
    }
    best.expect("at least the vertices were scanned")
}

fn gauss(mut mat: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, piv);
        rhs.swap(col, piv);
        let d = mat[col][col].clone();
        for v in mat[col].iter_mut() {
            *v = &*v / &d;
        }
        rhs[col] = &rhs[col] / &d;
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
