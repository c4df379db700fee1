//! Exact semistability analysis for a torus acting on V x P(E).
//!
//! A representation is described by its integer weight decomposition
//! ([`RepSpec`]), a point by its coefficient lists ([`TorusPoint`]). The
//! weight polyhedron conv(Wt(m)) + cone(Wt(v)) lives in the dual of the
//! Lie algebra; [`analyze`] decides membership of the origin exactly and,
//! in the unstable case, produces the squared distance together with the
//! optimal destabilizing direction. All verdicts depend on coefficient
//! supports only, never on magnitudes.

mod analyze;
mod limit;
mod moment;
mod rep;
mod strata;

pub use analyze::{
    analyze, stratum_label, varpi_e, varpi_rel, weight_polyhedron, StratumLabel, VarpiRel,
    VarpiValue, Verdict,
};
pub use limit::{limit, Limit};
pub use moment::moment_polyhedron_T;
pub use rep::{OneParamSubgroupQ, RepSpec, TorusPoint, WeightEntry};
pub use strata::{enumerate_strata, Stratum, SupportPattern, MAX_STRATA_WEIGHTS};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TorusGitError {
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("representation must have at least one E-weight")]
    NoEWeights,
    #[error("weight has {got} coordinates, expected {expected}")]
    WeightDim { expected: usize, got: usize },
    #[error("weights must have integer coordinates")]
    NonIntegralWeight,
    #[error("weight multiplicities must be at least 1")]
    ZeroMultiplicity,
    #[error("form rank {form} does not match representation rank {rank}")]
    FormRankMismatch { form: usize, rank: usize },
    #[error("point has {got} {part}-coefficients, expected {expected}")]
    SlotCount {
        part: char,
        expected: usize,
        got: usize,
    },
    #[error("point has no nonzero E-coefficient")]
    EmptyESupport,
    #[error("one-parameter subgroup direction is zero")]
    ZeroDirection,
    #[error("direction has {got} coordinates, expected {expected}")]
    DirectionDim { expected: usize, got: usize },
    #[error("{got} weights exceed the stratum enumeration cap of {cap}")]
    TooManyWeights { got: usize, cap: usize },
    #[error(transparent)]
    Geometry(#[from] ratgeom::RatGeomError),
}

pub type Result<T> = std::result::Result<T, TorusGitError>;
