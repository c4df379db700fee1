//! Exact rational convex geometry.
//!
//! Polyhedra are kept in generator form (convex hull of points plus a cone of
//! rays) over arbitrary-precision rationals. Everything downstream leans on
//! three exact primitives: LP feasibility (simplex with Bland's rule),
//! minimum-norm projection with a KKT certificate, and the double-description
//! conversion between generator and half-space form.

mod dd;
mod lp;
mod minnorm;
mod polyhedron;
mod rat;

pub use dd::{dual_cone_generators, from_halfspaces, intersect, to_halfspaces, Cone, HalfspaceForm};
pub use lp::{in_cone, nonneg_solve};
pub use minnorm::{min_norm_point, MinNorm, MAX_GENERATORS};
pub use polyhedron::{VPolyhedron, MAX_INTERSECT_RANK};
pub use rat::{
    parse_rational, rat, rat_int, rational_to_string, InnerProductForm, RatVec, Rational,
};

#[derive(Debug, thiserror::Error)]
pub enum RatGeomError {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("zero vector is not a valid ray")]
    ZeroRay,
    #[error("gram matrix must be square and symmetric")]
    FormNotSymmetric,
    #[error("gram matrix is not positive definite (leading minor {minor} fails)")]
    FormNotPositiveDefinite { minor: usize },
    #[error("operation needs a nonempty polyhedron")]
    EmptyPolyhedron,
    #[error("too many generators for exact projection: {got} (cap {cap})")]
    TooManyGenerators { got: usize, cap: usize },
    #[error("rank {got} exceeds the intersection cap {cap}")]
    RankTooLarge { got: usize, cap: usize },
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
    #[error("rank must be at least 1")]
    ZeroRank,
}

pub type Result<T> = std::result::Result<T, RatGeomError>;
