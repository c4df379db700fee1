use num::complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use ratgeom::{intersect, VPolyhedron};
use torus_git::{weight_polyhedron, RepSpec, TorusPoint};

use crate::{GroupGitError, GroupSpec, Result};

/// Coefficients this small relative to the largest one in the same part
/// are treated as zero before supports are taken; unipotent matrix
/// arithmetic in floating point perturbs exact zeros.
const SUPPORT_THRESHOLD: f64 = 1e-10;

/// Parameter schedule for sampling the unipotent radical. The group
/// element for a parameter vector is supplied by the caller as a point
/// transformer; the schedule fixes which parameters get evaluated and in
/// what order, so a run is reproducible from (seed, dim_params) alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnipotentSampler {
    pub dim_params: usize,
    pub schedule: Vec<Vec<f64>>,
    pub seed: u64,
}

impl UnipotentSampler {
    /// Standard schedule: the identity first, then 32 low-discrepancy
    /// grid points in [-3,3]^dim, then 32 seeded uniform draws from the
    /// same box.
    pub fn standard(dim_params: usize, seed: u64) -> Self {
        let mut schedule = vec![vec![0.0; dim_params]];
        for idx in 1..=32u64 {
            schedule.push(
                (0..dim_params)
                    .map(|d| 6.0 * halton(idx, PRIMES[d % PRIMES.len()]) - 3.0)
                    .collect(),
            );
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        for _ in 0..32 {
            schedule.push((0..dim_params).map(|_| rng.gen_range(-3.0..3.0)).collect());
        }
        UnipotentSampler {
            dim_params,
            schedule,
            seed,
        }
    }

    pub fn from_schedule(dim_params: usize, schedule: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        if schedule.is_empty() {
            return Err(GroupGitError::EmptySchedule);
        }
        for s in &schedule {
            if s.len() != dim_params {
                return Err(GroupGitError::BadSampleDim {
                    expected: dim_params,
                    got: s.len(),
                });
            }
        }
        Ok(UnipotentSampler {
            dim_params,
            schedule,
            seed,
        })
    }
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical-inverse low-discrepancy sequence in base `base`.
fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// A sampled intersection of torus weight polyhedra over the unipotent
/// radical. `stabilized` reports whether the early-stop criterion was
/// met; the sampling schedule gives no hard guarantee that further
/// samples could not shrink the intersection, so a false value flags an
/// exhausted schedule without a stable tail.
#[derive(Debug, Clone)]
pub struct PuSampled {
    pub polyhedron: VPolyhedron,
    pub samples_used: usize,
    pub stabilized: bool,
}

/// Intersection of the weight polyhedra of the transformed points
/// `act(s, x)` over the schedule, stopping early once `early_stop`
/// consecutive samples leave the intersection unchanged. Coefficients of
/// acted points below the relative support threshold are zeroed before
/// supports are read off.
pub fn p_u_sampled<F>(
    spec: &RepSpec,
    x: &TorusPoint,
    sampler: &UnipotentSampler,
    act: F,
    early_stop: usize,
) -> Result<PuSampled>
where
    F: Fn(&[f64], &TorusPoint) -> TorusPoint,
{
    if sampler.schedule.is_empty() {
        return Err(GroupGitError::EmptySchedule);
    }
    spec.validate_point(x)?;
    let mut current: Option<VPolyhedron> = None;
    let mut unchanged = 0usize;
    let mut used = 0usize;
    for s in &sampler.schedule {
        if s.len() != sampler.dim_params {
            return Err(GroupGitError::BadSampleDim {
                expected: sampler.dim_params,
                got: s.len(),
            });
        }
        let acted = act(s, x);
        if s.iter().all(|c| *c == 0.0) && !approx_same_point(&acted, x) {
            return Err(GroupGitError::ActionNotIdentityAtZero);
        }
        let moved = clean_point(&acted);
        let p = weight_polyhedron(spec, &moved)?;
        used += 1;
        current = Some(match current {
            None => p,
            Some(acc) => {
                let next = intersect(&acc, &p)?;
                if next.set_equal(&acc) {
                    unchanged += 1;
                } else {
                    unchanged = 0;
                }
                next
            }
        });
        if unchanged >= early_stop {
            break;
        }
    }
    Ok(PuSampled {
        polyhedron: current.expect("schedule is nonempty"),
        samples_used: used,
        stabilized: unchanged >= early_stop,
    })
}

/// Dominant-chamber slice of the negated sampled intersection: the
/// rational points of the result are the dominant characters whose
/// shifted problem is semistable on the Borel orbit closure.
#[allow(non_snake_case)]
pub fn moment_polyhedron_Bx<F>(
    spec: &RepSpec,
    x: &TorusPoint,
    g: &GroupSpec,
    sampler: &UnipotentSampler,
    act: F,
    early_stop: usize,
) -> Result<PuSampled>
where
    F: Fn(&[f64], &TorusPoint) -> TorusPoint,
{
    let pu = p_u_sampled(spec, x, sampler, act, early_stop)?;
    let chamber = g.chamber()?;
    let polyhedron = intersect(&pu.polyhedron.negate(), &chamber)?;
    Ok(PuSampled {
        polyhedron,
        samples_used: pu.samples_used,
        stabilized: pu.stabilized,
    })
}

fn clean_point(x: &TorusPoint) -> TorusPoint {
    TorusPoint::new(clean_part(&x.coeffs_v), clean_part(&x.coeffs_e))
}

fn clean_part(coeffs: &[Complex64]) -> Vec<Complex64> {
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    coeffs
        .iter()
        .map(|c| {
            if c.norm() < SUPPORT_THRESHOLD * max {
                Complex64::new(0.0, 0.0)
            } else {
                *c
            }
        })
        .collect()
}

/// Relative coefficient agreement at tolerance 1e-9, part scale taken
/// from the larger point.
fn approx_same_point(a: &TorusPoint, b: &TorusPoint) -> bool {
    approx_same_part(&a.coeffs_v, &b.coeffs_v) && approx_same_part(&a.coeffs_e, &b.coeffs_e)
}

fn approx_same_part(a: &[Complex64], b: &[Complex64]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let scale = a
        .iter()
        .chain(b.iter())
        .map(|c| c.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    a.iter().zip(b).all(|(p, q)| (p - q).norm() <= 1e-9 * scale)
}
