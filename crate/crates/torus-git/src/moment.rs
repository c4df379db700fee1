use ratgeom::VPolyhedron;

use crate::analyze::weight_polyhedron;
use crate::rep::{RepSpec, TorusPoint};
use crate::Result;

/// Moment-map image of the orbit closure of `x`, as a polyhedron in the
/// dual Lie algebra: the negative of the weight polyhedron. Its rational
/// points are exactly the characters whose shifted problem makes `x`
/// semistable.
#[allow(non_snake_case)]
pub fn moment_polyhedron_T(spec: &RepSpec, x: &TorusPoint) -> Result<VPolyhedron> {
    Ok(weight_polyhedron(spec, x)?.negate())
}
