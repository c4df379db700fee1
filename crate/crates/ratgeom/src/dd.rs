use num::{Signed, Zero};

use crate::polyhedron::{VPolyhedron, MAX_INTERSECT_RANK};
use crate::rat::{RatVec, Rational};
use crate::{RatGeomError, Result};

/// Generators of a polyhedral cone: a lineality basis plus extreme rays
/// (extreme modulo the lineality space).
#[derive(Debug, Clone)]
pub struct Cone {
    pub lineality: Vec<RatVec>,
    pub rays: Vec<RatVec>,
}

impl Cone {
    /// Lineality folded into the ray list as +/- pairs.
    pub fn all_rays(&self) -> Vec<RatVec> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.neg());
        }
        out
    }
}

/// Half-space form of a polyhedron in R^rank: each row (a, c) encodes
/// <a, x> + c >= 0. Equalities appear as opposite row pairs.
#[derive(Debug, Clone)]
pub struct HalfspaceForm {
    pub rank: usize,
    pub rows: Vec<RatVec>, // each of dimension rank + 1
}

/// Double description: generators of {x : <a, x> >= 0 for all a in ineqs}.
///
/// Incremental Motzkin construction. The state starts as the full space
/// (lineality basis, no rays) and each inequality either pivots one lineality
/// direction into a ray (when it does not vanish on the lineality) or splits
/// the ray set, combining adjacent positive/negative pairs. Adjacency is the
/// combinatorial test: p and n are adjacent iff no other current ray is tight
/// on every processed inequality tight at both p and n. All processed
/// inequalities vanish on the current lineality space, which keeps the tight
/// sets invariant under the pivot updates.
pub fn dual_cone_generators(dim: usize, ineqs: &[RatVec]) -> Cone {
    let mut lineality: Vec<RatVec> = (0..dim)
        .map(|i| {
            let mut c = vec![Rational::zero(); dim];
            c[i] = Rational::from_integer(1.into());
            RatVec::new(c)
        })
        .collect();
    let mut rays: Vec<RatVec> = Vec::new();
    let mut processed: Vec<RatVec> = Vec::new();

    for a in ineqs {
        debug_assert_eq!(a.dim(), dim);
        if a.is_zero() {
            continue;
        }
        let lin_vals: Vec<Rational> = lineality.iter().map(|l| a.dot(l)).collect();
        if let Some(idx) = lin_vals.iter().position(|v| !v.is_zero()) {
            // Pivot branch: one lineality direction leaves the lineality
            // space and becomes a ray on the positive side of `a`.
            let mut l0 = lineality.remove(idx);
            if a.dot(&l0).is_negative() {
                l0 = l0.neg();
            }
            let d0 = a.dot(&l0);
            for l in lineality.iter_mut() {
                let f = a.dot(l) / &d0;
                *l = l.sub(&l0.scale(&f)).primitive();
            }
            for r in rays.iter_mut() {
                let f = a.dot(r) / &d0;
                *r = r.sub(&l0.scale(&f)).primitive();
            }
            rays.push(l0.primitive());
        } else {
            let mut pos = Vec::new();
            let mut zero = Vec::new();
            let mut neg = Vec::new();
            for r in &rays {
                let v = a.dot(r);
                if v.is_positive() {
                    pos.push(r.clone());
                } else if v.is_zero() {
                    zero.push(r.clone());
                } else {
                    neg.push(r.clone());
                }
            }
            if !neg.is_empty() {
                let mut next = Vec::new();
                next.extend(pos.iter().cloned());
                next.extend(zero.iter().cloned());
                for p in &pos {
                    for n in &neg {
                        if adjacent(p, n, &rays, &processed) {
                            let w = n.scale(&a.dot(p)).sub(&p.scale(&a.dot(n)));
                            let w = w.primitive();
                            if !w.is_zero() && !next.contains(&w) {
                                next.push(w);
                            }
                        }
                    }
                }
                rays = next;
            }
        }
        processed.push(a.clone());
    }

    Cone { lineality, rays }
}

fn tight_set(r: &RatVec, processed: &[RatVec]) -> Vec<bool> {
    processed.iter().map(|a| a.dot(r).is_zero()).collect()
}

fn adjacent(p: &RatVec, n: &RatVec, rays: &[RatVec], processed: &[RatVec]) -> bool {
    let tp = tight_set(p, processed);
    let tn = tight_set(n, processed);
    let common: Vec<usize> = (0..processed.len()).filter(|&i| tp[i] && tn[i]).collect();
    for r in rays {
        if r == p || r == n {
            continue;
        }
        if common.iter().all(|&i| processed[i].dot(r).is_zero()) {
            return false;
        }
    }
    true
}

fn homogenize_generators(p: &VPolyhedron) -> Vec<RatVec> {
    let mut gens = Vec::with_capacity(p.points().len() + p.rays().len());
    for pt in p.points() {
        let mut c = pt.coords.clone();
        c.push(Rational::from_integer(1.into()));
        gens.push(RatVec::new(c));
    }
    for r in p.rays() {
        let mut c = r.coords.clone();
        c.push(Rational::zero());
        gens.push(RatVec::new(c));
    }
    gens
}

/// Facets of the homogenization, i.e. the half-space form of the polyhedron.
/// Computed as the double description of the dual cone (whose inequality
/// normals are the lifted generators).
pub fn to_halfspaces(p: &VPolyhedron) -> Result<HalfspaceForm> {
    if p.is_empty() {
        return Err(RatGeomError::EmptyPolyhedron);
    }
    let gens = homogenize_generators(p);
    let dual = dual_cone_generators(p.rank() + 1, &gens);
    Ok(HalfspaceForm {
        rank: p.rank(),
        rows: dual.all_rays(),
    })
}

fn dehomogenize(rank: usize, cone: &Cone) -> Result<VPolyhedron> {
    let mut points = Vec::new();
    let mut rays = Vec::new();
    let mut push = |g: &RatVec| {
        let t = &g.coords[rank];
        if t.is_positive() {
            let pt: Vec<Rational> = g.coords[..rank].iter().map(|c| c / t).collect();
            points.push(RatVec::new(pt));
        } else {
            // The homogenization lives in {t >= 0}, so t = 0 here.
            debug_assert!(t.is_zero());
            let dir = RatVec::new(g.coords[..rank].to_vec());
            if !dir.is_zero() {
                rays.push(dir);
            }
        }
    };
    for r in &cone.rays {
        push(r);
    }
    for l in &cone.lineality {
        push(l);
        push(&l.neg());
    }
    if points.is_empty() {
        return Ok(VPolyhedron::empty(rank));
    }
    VPolyhedron::new(rank, points, rays)
}

/// Generator form of {x : <a, x> + c >= 0 for all rows (a, c)}.
pub fn from_halfspaces(rank: usize, rows: &[RatVec]) -> Result<VPolyhedron> {
    if rank == 0 {
        return Err(RatGeomError::ZeroRank);
    }
    for row in rows {
        if row.dim() != rank + 1 {
            return Err(RatGeomError::RankMismatch {
                expected: rank + 1,
                got: row.dim(),
            });
        }
    }
    let mut ineqs: Vec<RatVec> = rows.to_vec();
    // The homogenization constraint t >= 0 is not implied by arbitrary rows.
    let mut t_row = vec![Rational::zero(); rank + 1];
    t_row[rank] = Rational::from_integer(1.into());
    ineqs.push(RatVec::new(t_row));
    let cone = dual_cone_generators(rank + 1, &ineqs);
    dehomogenize(rank, &cone)
}

/// Exact intersection via double description on the joined half-space forms.
/// Capped at rank [`MAX_INTERSECT_RANK`].
pub fn intersect(p: &VPolyhedron, q: &VPolyhedron) -> Result<VPolyhedron> {
    if p.rank() != q.rank() {
        return Err(RatGeomError::RankMismatch {
            expected: p.rank(),
            got: q.rank(),
        });
    }
    if p.rank() > MAX_INTERSECT_RANK {
        return Err(RatGeomError::RankTooLarge {
            got: p.rank(),
            cap: MAX_INTERSECT_RANK,
        });
    }
    if p.is_empty() || q.is_empty() {
        return Ok(VPolyhedron::empty(p.rank()));
    }
    let hp = to_halfspaces(p)?;
    let hq = to_halfspaces(q)?;
    let mut rows = hp.rows;
    rows.extend(hq.rows);
    let cone = dual_cone_generators(p.rank() + 1, &rows);
    dehomogenize(p.rank(), &cone)
}
