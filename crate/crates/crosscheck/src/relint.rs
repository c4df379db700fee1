//! Exact relative-interior membership for rational polyhedra.
//!
//! A point is in the relative interior when every valid inequality is
//! either strict at the point or holds with equality on the whole
//! polyhedron. The half-space form makes that decidable: equalities
//! appear as opposite row pairs, so a tight row is harmless exactly
//! when its negation is also a row.

use std::collections::BTreeSet;

use num::One;
use ratgeom::{to_halfspaces, RatGeomError, RatVec, Rational, VPolyhedron};

use crate::Result;

/// Exact test for `q` in the relative interior of `p`. The empty
/// polyhedron has empty relative interior.
pub fn relint_contains(p: &VPolyhedron, q: &RatVec) -> Result<bool> {
    if p.is_empty() {
        return Ok(false);
    }
    if q.dim() != p.rank() {
        return Err(RatGeomError::RankMismatch {
            expected: p.rank(),
            got: q.dim(),
        }
        .into());
    }
    let hs = to_halfspaces(p)?;
    let normalized: BTreeSet<Vec<Rational>> =
        hs.rows.iter().map(|row| normalize_row(&row.coords)).collect();
    for row in &hs.rows {
        let mut value = row.coords[p.rank()].clone();
        for (a, x) in row.coords[..p.rank()].iter().zip(&q.coords) {
            value += a * x;
        }
        if value.is_negative() {
            return Ok(false);
        }
        if value.is_zero() {
            let negated: Vec<Rational> = row.coords.iter().map(|c| -c.clone()).collect();
            if !normalized.contains(&normalize_row(&negated)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Scale-canonical representative of a half-space row: divide by the
/// absolute value of the first nonzero coordinate, so rows that differ
/// by a positive factor collide and opposite rows stay opposite.
fn normalize_row(coords: &[Rational]) -> Vec<Rational> {
    let scale = coords
        .iter()
        .find(|c| !c.is_zero())
        .map(|c| c.abs())
        .unwrap_or_else(Rational::one);
    coords.iter().map(|c| c / &scale).collect()
}
