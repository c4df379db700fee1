//! Numerical moment-map layer for linear actions on V x P(E): moment
//! evaluation, the norm-square gradient flow with its companion group
//! trajectory, limit diagnostics, and Kempf-Ness evaluation along
//! one-parameter directions.

mod flow;
mod kn;
mod moment;
mod rep;

pub use flow::{flow, semistable_flow, FlowOpts, FlowResult, TrajectorySample};
pub use kn::kempf_ness;
pub use moment::{f_value, grad_f, metric_pair, moment, varpi_phi, GradF, VarpiPhi};
pub use rep::{su2_block_rep, torus_rep, verify_torus_weights, CartanSpec, HermitianRep, StatePoint};

use thiserror::Error;

pub type Result<T> = std::result::Result<T, KahlerError>;

#[derive(Debug, Error)]
pub enum KahlerError {
    #[error("basis action {index} on the {part} part is not anti-Hermitian (relative defect {defect:.3e})")]
    NotAntiHermitian {
        index: usize,
        part: char,
        defect: f64,
    },
    #[error("commutator [{i},{j}] leaves the real span of the basis actions (residual {residual:.3e})")]
    BracketEscapesSpan { i: usize, j: usize, residual: f64 },
    #[error("basis action {index} has shape {got_rows}x{got_cols} on the {part} part, expected {expected}x{expected}")]
    BadActionShape {
        index: usize,
        part: char,
        expected: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("no basis actions supplied")]
    EmptyBasis,
    #[error("state has {got} {part}-coordinates, representation expects {expected}")]
    BadStateDim {
        part: char,
        expected: usize,
        got: usize,
    },
    #[error("projective part of the state is zero")]
    ZeroProjectivePart,
    #[error("moment coordinate {index} has imaginary defect {defect:.3e}")]
    MomentNotReal { index: usize, defect: f64 },
    #[error("zero direction")]
    ZeroDirection,
    #[error("declared torus indices do not diagonalize simultaneously (off-diagonal mass {mass:.3e})")]
    TorusNotDiagonalizable { mass: f64 },
    #[error("recovered slot weight {slot:?} on the {part} part matches no declared weight")]
    WeightMismatch { part: char, slot: usize },
    #[error("weight multiset mismatch on the {part} part")]
    WeightCountMismatch { part: char },
    #[error("group trajectory left the span of the basis actions (relative residual {residual:.3e})")]
    XiResidual { residual: f64 },
    #[error("cartan data references basis index {index}, but the basis has {len} elements")]
    BadCartanIndex { index: usize, len: usize },
    #[error("flow did not converge by t = {t_final:.3e} (grad norm {grad_norm:.3e})")]
    NonConverged {
        t_final: f64,
        grad_norm: f64,
        partial: Box<FlowResult>,
    },
    #[error("step size underflow at t = {t:.3e}")]
    StepUnderflow { t: f64 },
    #[error("geometry error: {0}")]
    Geometry(#[from] ratgeom::RatGeomError),
    #[error("representation error: {0}")]
    Torus(#[from] torus_git::TorusGitError),
}
