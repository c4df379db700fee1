use num::complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use ratgeom::{min_norm_point, InnerProductForm, RatVec, VPolyhedron};
use torus_git::{OneParamSubgroupQ, RepSpec, TorusPoint, WeightEntry};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_spec(rng: &mut ChaCha20Rng, rank: usize) -> RepSpec {
    let n_e = rng.gen_range(1..=4);
    let n_v = rng.gen_range(0..=3);
    let entry = |rng: &mut ChaCha20Rng| {
        let w: Vec<i64> = (0..rank).map(|_| rng.gen_range(-4..=4)).collect();
        WeightEntry::from_ints(&w, rng.gen_range(1..=2))
    };
    let weights_e = (0..n_e).map(|_| entry(rng)).collect();
    let weights_v = (0..n_v).map(|_| entry(rng)).collect();
    let form = if rng.gen_bool(0.5) {
        InnerProductForm::identity(rank)
    } else if rank == 1 {
        InnerProductForm::new(vec![vec![rng.gen_range(1..=3)]]).unwrap()
    } else {
        InnerProductForm::new(vec![vec![2, 1], vec![1, 1]]).unwrap()
    };
    RepSpec::new(rank, weights_e, weights_v, form).unwrap()
}

/// Random point with at least one live E-slot; roughly half the slots of
/// each part carry a random nonzero coefficient.
pub fn random_point(rng: &mut ChaCha20Rng, spec: &RepSpec) -> TorusPoint {
    let coeff = |rng: &mut ChaCha20Rng| loop {
        let c = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if c.norm_sqr() > 1e-4 {
            return c;
        }
    };
    let mut coeffs_v = vec![Complex64::new(0.0, 0.0); spec.dim_v()];
    for c in coeffs_v.iter_mut() {
        if rng.gen_bool(0.5) {
            *c = coeff(rng);
        }
    }
    let mut coeffs_e = vec![Complex64::new(0.0, 0.0); spec.dim_e()];
    for c in coeffs_e.iter_mut() {
        if rng.gen_bool(0.5) {
            *c = coeff(rng);
        }
    }
    if coeffs_e.iter().all(|c| c.norm_sqr() == 0.0) {
        let slot = rng.gen_range(0..coeffs_e.len());
        coeffs_e[slot] = coeff(rng);
    }
    TorusPoint::new(coeffs_v, coeffs_e)
}

/// Candidate destabilizing directions for `x`: the negated sharps of
/// minimum-norm points over every nonempty support-subset polyhedron,
/// plus a small integer grid. Every optimal direction of a torus verdict
/// arises from some support subset, so this list is exhaustive for the
/// existence side of the Hilbert-Mumford test.
pub fn candidate_directions(spec: &RepSpec, x: &TorusPoint) -> Vec<OneParamSubgroupQ> {
    let e_supp = spec.e_support(x);
    let v_supp: Vec<RatVec> = spec
        .v_support(x)
        .into_iter()
        .filter(|w| !w.is_zero())
        .collect();
    let adj = spec.form().adjugate_form();
    let mut out: Vec<OneParamSubgroupQ> = Vec::new();
    for e_mask in 1u32..(1 << e_supp.len()) {
        for v_mask in 0u32..(1 << v_supp.len()) {
            let points: Vec<RatVec> = (0..e_supp.len())
                .filter(|i| e_mask & (1 << i) != 0)
                .map(|i| e_supp[i].clone())
                .collect();
            let rays: Vec<RatVec> = (0..v_supp.len())
                .filter(|j| v_mask & (1 << j) != 0)
                .map(|j| v_supp[j].clone())
                .collect();
            let p = VPolyhedron::new(spec.rank(), points, rays).unwrap();
            if p.contains_origin() {
                continue;
            }
            let mn = min_norm_point(&p, &adj).unwrap();
            let tau = OneParamSubgroupQ::new(spec.form().sharp(&mn.argmin).neg());
            if !tau.is_zero() && !out.contains(&tau) {
                out.push(tau);
            }
        }
    }
    let rank = spec.rank();
    let mut grid = vec![RatVec::zero(rank)];
    for i in 0..rank {
        let mut next = Vec::new();
        for v in grid {
            for c in -3..=3i64 {
                let mut w = v.clone();
                w.coords[i] = ratgeom::rat_int(c);
                next.push(w);
            }
        }
        grid = next;
    }
    for v in grid {
        if !v.is_zero() {
            let tau = OneParamSubgroupQ::new(v);
            if !out.contains(&tau) {
                out.push(tau);
            }
        }
    }
    out
}
