use serde::{Deserialize, Serialize};

use crate::lp::{in_cone, nonneg_solve};
use crate::rat::{RatVec, Rational};
use crate::{RatGeomError, Result};

/// Rank cap for the double-description intersection; the adjacency tests are
/// combinatorial and blow up beyond small ambient dimensions.
pub const MAX_INTERSECT_RANK: usize = 4;

/// Generator-form polyhedron: conv(points) + cone(rays).
///
/// The set with no points is THE empty set; a rays-only description is
/// normalized to it on construction. Generators are stored as given (only
/// exact duplicates are dropped), so serialization round-trips bit-exactly;
/// canonicalization is explicit via [`VPolyhedron::recession_rays`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VPolyhedron {
    rank: usize,
    points: Vec<RatVec>,
    rays: Vec<RatVec>,
}

impl VPolyhedron {
    pub fn new(rank: usize, points: Vec<RatVec>, rays: Vec<RatVec>) -> Result<Self> {
        if rank == 0 {
            return Err(RatGeomError::ZeroRank);
        }
        for p in &points {
            if p.dim() != rank {
                return Err(RatGeomError::RankMismatch {
                    expected: rank,
                    got: p.dim(),
                });
            }
        }
        for r in &rays {
            if r.dim() != rank {
                return Err(RatGeomError::RankMismatch {
                    expected: rank,
                    got: r.dim(),
                });
            }
            if r.is_zero() {
                return Err(RatGeomError::ZeroRay);
            }
        }
        let mut points = points;
        let mut rays = rays;
        dedup_exact(&mut points);
        dedup_exact(&mut rays);
        if points.is_empty() {
            rays.clear();
        }
        Ok(VPolyhedron { rank, points, rays })
    }

    pub fn empty(rank: usize) -> Self {
        VPolyhedron {
            rank,
            points: vec![],
            rays: vec![],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn points(&self) -> &[RatVec] {
        &self.points
    }

    pub fn rays(&self) -> &[RatVec] {
        &self.rays
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact membership: q = sum alpha_i p_i + sum beta_j r_j with
    /// alpha >= 0, sum alpha = 1, beta >= 0 (LP feasibility).
    pub fn contains(&self, q: &RatVec) -> bool {
        if self.is_empty() || q.dim() != self.rank {
            return false;
        }
        // Lift each point to (p, 1) and each ray to (r, 0); membership in the
        // homogenization at height 1 encodes the convex + conic combination.
        let mut cols: Vec<RatVec> = Vec::with_capacity(self.points.len() + self.rays.len());
        for p in &self.points {
            let mut c = p.coords.clone();
            c.push(Rational::from_integer(1.into()));
            cols.push(RatVec::new(c));
        }
        for r in &self.rays {
            let mut c = r.coords.clone();
            c.push(Rational::from_integer(0.into()));
            cols.push(RatVec::new(c));
        }
        let mut b = q.coords.clone();
        b.push(Rational::from_integer(1.into()));
        nonneg_solve(&cols, &RatVec::new(b)).is_some()
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(&RatVec::zero(self.rank))
    }

    pub fn minkowski_sum(&self, other: &VPolyhedron) -> Result<VPolyhedron> {
        if self.rank != other.rank {
            return Err(RatGeomError::RankMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        if self.is_empty() || other.is_empty() {
            return Ok(VPolyhedron::empty(self.rank));
        }
        let mut points = Vec::with_capacity(self.points.len() * other.points.len());
        for p in &self.points {
            for q in &other.points {
                points.push(p.add(q));
            }
        }
        let mut rays = self.rays.clone();
        rays.extend(other.rays.iter().cloned());
        VPolyhedron::new(self.rank, points, rays)
    }

    pub fn translate(&self, t: &RatVec) -> VPolyhedron {
        VPolyhedron {
            rank: self.rank,
            points: self.points.iter().map(|p| p.add(t)).collect(),
            rays: self.rays.clone(),
        }
    }

    pub fn negate(&self) -> VPolyhedron {
        VPolyhedron {
            rank: self.rank,
            points: self.points.iter().map(RatVec::neg).collect(),
            rays: self.rays.iter().map(RatVec::neg).collect(),
        }
    }

    /// Scale by a positive rational.
    pub fn scale(&self, c: &Rational) -> VPolyhedron {
        debug_assert!(*c > Rational::from_integer(0.into()));
        VPolyhedron {
            rank: self.rank,
            points: self.points.iter().map(|p| p.scale(c)).collect(),
            rays: self.rays.clone(),
        }
    }

    pub fn ray_in_recession(&self, r: &RatVec) -> bool {
        if self.is_empty() {
            return false;
        }
        in_cone(&self.rays, r)
    }

    /// Canonical generator list for the recession cone: primitive directions,
    /// deduplicated, redundant rays removed by exact LP, sorted.
    pub fn recession_rays(&self) -> Vec<RatVec> {
        if self.is_empty() {
            return vec![];
        }
        let mut rays: Vec<RatVec> = self.rays.iter().map(RatVec::primitive).collect();
        dedup_exact(&mut rays);
        // Greedy removal is sound for cones: a generator inside the cone of
        // the others leaves the cone unchanged when dropped.
        let mut keep: Vec<bool> = vec![true; rays.len()];
        for i in 0..rays.len() {
            keep[i] = false;
            let others: Vec<RatVec> = rays
                .iter()
                .enumerate()
                .filter(|(j, _)| keep[*j])
                .map(|(_, r)| r.clone())
                .collect();
            if !in_cone(&others, &rays[i]) {
                keep[i] = true;
            }
        }
        let mut out: Vec<RatVec> = rays
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(r, _)| r)
            .collect();
        out.sort_by(|a, b| a.coords.cmp(&b.coords));
        out
    }

    /// Equality as sets (not as generator lists): mutual containment, with
    /// rays checked against the recession cone of the other side.
    pub fn set_equal(&self, other: &VPolyhedron) -> bool {
        if self.rank != other.rank {
            return false;
        }
        match (self.is_empty(), other.is_empty()) {
            (true, true) => return true,
            (true, false) | (false, true) => return false,
            _ => {}
        }
        self.points.iter().all(|p| other.contains(p))
            && self.rays.iter().all(|r| in_cone(&other.rays, r))
            && other.points.iter().all(|p| self.contains(p))
            && other.rays.iter().all(|r| in_cone(&self.rays, r))
    }

    /// Exact squared distance from `q` in the given form, via projection of
    /// the origin onto the translated set.
    pub fn sqdist_from(
        &self,
        q: &RatVec,
        form: &crate::rat::InnerProductForm,
    ) -> Result<Rational> {
        let shifted = self.translate(&q.neg());
        Ok(crate::minnorm::min_norm_point(&shifted, form)?.sqdist)
    }
}

fn dedup_exact(v: &mut Vec<RatVec>) {
    let mut seen: Vec<RatVec> = Vec::with_capacity(v.len());
    v.retain(|x| {
        if seen.contains(x) {
            false
        } else {
            seen.push(x.clone());
            true
        }
    });
}

#[derive(Serialize, Deserialize)]
struct RawPolyhedron {
    rank: usize,
    points: Vec<RatVec>,
    rays: Vec<RatVec>,
}

impl Serialize for VPolyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawPolyhedron {
            rank: self.rank,
            points: self.points.clone(),
            rays: self.rays.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VPolyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPolyhedron::deserialize(d)?;
        VPolyhedron::new(raw.rank, raw.points, raw.rays).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn poly(rank: usize, pts: &[&[i64]], rays: &[&[i64]]) -> VPolyhedron {
        VPolyhedron::new(
            rank,
            pts.iter().map(|p| RatVec::from_ints(p)).collect(),
            rays.iter().map(|r| RatVec::from_ints(r)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_ray_rejected() {
        assert!(matches!(
            VPolyhedron::new(2, vec![RatVec::zero(2)], vec![RatVec::zero(2)]),
            Err(RatGeomError::ZeroRay)
        ));
    }

    #[test]
    fn rays_only_normalizes_to_empty() {
        let p = VPolyhedron::new(2, vec![], vec![RatVec::from_ints(&[1, 0])]).unwrap();
        assert!(p.is_empty());
        assert!(p.rays().is_empty());
    }

    #[test]
    fn containment_triangle() {
        let p = poly(2, &[&[0, 0], &[2, 0], &[0, 2]], &[]);
        assert!(p.contains(&RatVec::new(vec![rat(1, 2), rat(1, 2)])));
        assert!(p.contains(&RatVec::from_ints(&[2, 0])));
        assert!(!p.contains(&RatVec::from_ints(&[2, 1])));
        assert!(!p.contains(&RatVec::from_ints(&[-1, 0])));
    }

    #[test]
    fn containment_uses_rays() {
        let p = poly(2, &[&[1, 1]], &[&[1, 0], &[0, 1]]);
        assert!(p.contains(&RatVec::from_ints(&[5, 2])));
        assert!(!p.contains(&RatVec::from_ints(&[0, 0])));
    }

    #[test]
    fn minkowski_segments_make_square() {
        let a = poly(2, &[&[0, 0], &[1, 0]], &[]);
        let b = poly(2, &[&[0, 0], &[0, 1]], &[]);
        let s = a.minkowski_sum(&b).unwrap();
        assert!(s.contains(&RatVec::new(vec![rat(1, 2), rat(1, 2)])));
        assert_eq!(s.points().len(), 4);
    }

    #[test]
    fn minkowski_with_empty_is_empty() {
        let a = poly(2, &[&[0, 0]], &[]);
        let e = VPolyhedron::empty(2);
        assert!(a.minkowski_sum(&e).unwrap().is_empty());
    }

    #[test]
    fn recession_rays_canonical() {
        // (2,0) and (1,0) collapse to one primitive direction; (1,1) sits
        // inside cone{(1,0),(0,1)} and is dropped as redundant.
        let p = poly(2, &[&[0, 0]], &[&[2, 0], &[1, 0], &[0, 3], &[1, 1]]);
        let rec = p.recession_rays();
        assert_eq!(
            rec,
            vec![RatVec::from_ints(&[0, 1]), RatVec::from_ints(&[1, 0])]
        );
    }

    #[test]
    fn set_equality_ignores_representation() {
        let a = poly(2, &[&[0, 0], &[1, 0], &[2, 0]], &[&[0, 1]]);
        let b = poly(2, &[&[0, 0], &[2, 0]], &[&[0, 2]]);
        assert!(a.set_equal(&b));
        let c = poly(2, &[&[0, 0], &[2, 0]], &[]);
        assert!(!a.set_equal(&c));
    }

    #[test]
    fn json_round_trip_bit_exact() {
        let p = VPolyhedron::new(
            2,
            vec![RatVec::new(vec![rat(1, 3), rat(-7, 2)])],
            vec![RatVec::from_ints(&[0, 5])],
        )
        .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let q: VPolyhedron = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert_eq!(serde_json::to_string(&q).unwrap(), s);
    }
}
