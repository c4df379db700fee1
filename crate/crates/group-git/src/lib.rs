//! Nonabelian bookkeeping over the exact torus layer: Weyl group data and
//! dominance, the duality between one-parameter subgroups and characters,
//! shifted-representation constructions, and sampled intersections of
//! torus weight polyhedra over the unipotent radical.
//!
//! Supported groups are tori, SL2, and finite products of these; anything
//! else enters through user-supplied weight tables, Weyl matrices, and
//! action matrices.

mod group;
mod sampler;
mod shift;
mod sl2;

pub use group::GroupSpec;
pub use sampler::{moment_polyhedron_Bx, p_u_sampled, PuSampled, UnipotentSampler};
pub use shift::{find_highest_slot, shift_point, shift_rep, tau_flat};
pub use sl2::{sl2_sym_unipotent, sl2_sym_weights, Sl2Rep};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupGitError {
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("form rank {form} does not match group rank {rank}")]
    FormRankMismatch { form: usize, rank: usize },
    #[error("positive root is zero or has wrong dimension")]
    BadRoot,
    #[error("Weyl element is not a square integer matrix of the group rank")]
    BadWeylShape,
    #[error("Weyl element does not preserve the form")]
    WeylFormViolation,
    #[error("Weyl set is not closed under composition and inversion")]
    WeylNotClosed,
    #[error("no Weyl translate of the given vector is dominant")]
    NoDominantTranslate,
    #[error("one-parameter subgroup direction is zero")]
    ZeroDirection,
    #[error("shift multiplier must be positive")]
    ZeroShiftMultiplier,
    #[error("shift character is not dominant")]
    NonDominantShift,
    #[error("ell times lambda is not integral")]
    NonIntegralShift,
    #[error("irrep weight list does not contain the highest weight")]
    MissingHighestWeight,
    #[error("slot {slot} is out of range for {len} irrep weights")]
    BadIrrepSlot { slot: usize, len: usize },
    #[error("sampler schedule is empty")]
    EmptySchedule,
    #[error("sample parameter has {got} coordinates, expected {expected}")]
    BadSampleDim { expected: usize, got: usize },
    #[error("action does not fix the point at parameter zero")]
    ActionNotIdentityAtZero,
    #[error(transparent)]
    Torus(#[from] torus_git::TorusGitError),
    #[error(transparent)]
    Geometry(#[from] ratgeom::RatGeomError),
}

pub type Result<T> = std::result::Result<T, GroupGitError>;
