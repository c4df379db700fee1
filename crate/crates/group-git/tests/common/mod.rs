#![allow(dead_code)]

use num::complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use ratgeom::{InnerProductForm, RatVec};
use torus_git::{RepSpec, TorusPoint, WeightEntry};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_form(rng: &mut ChaCha20Rng, rank: usize) -> InnerProductForm {
    match rng.gen_range(0..3) {
        0 => InnerProductForm::identity(rank),
        1 => {
            let rows = (0..rank)
                .map(|i| {
                    (0..rank)
                        .map(|j| if i == j { 1 + i as i64 } else { 0 })
                        .collect()
                })
                .collect();
            InnerProductForm::new(rows).unwrap()
        }
        _ => {
            if rank == 2 {
                InnerProductForm::new(vec![vec![2, 1], vec![1, 1]]).unwrap()
            } else {
                InnerProductForm::identity(rank)
            }
        }
    }
}

/// Small torus instance with every entry of multiplicity one, so E-slot
/// indices coincide with entry indices.
pub fn random_torus_instance(rng: &mut ChaCha20Rng, rank: usize) -> (RepSpec, TorusPoint) {
    let dim_e = rng.gen_range(1..=4);
    let dim_v = rng.gen_range(0..=2);
    let entry = |rng: &mut ChaCha20Rng| {
        WeightEntry::new(
            RatVec::from_ints(
                &(0..rank)
                    .map(|_| rng.gen_range(-4..=4))
                    .collect::<Vec<i64>>(),
            ),
            1,
        )
    };
    let weights_e: Vec<WeightEntry> = (0..dim_e).map(|_| entry(rng)).collect();
    let weights_v: Vec<WeightEntry> = (0..dim_v).map(|_| entry(rng)).collect();
    let form = random_form(rng, rank);
    let spec = RepSpec::new(rank, weights_e, weights_v, form).unwrap();

    let coeff = |rng: &mut ChaCha20Rng| {
        if rng.gen_bool(0.35) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
        }
    };
    let mut coeffs_e: Vec<Complex64> = (0..dim_e).map(|_| coeff(rng)).collect();
    if coeffs_e.iter().all(|c| c.norm() == 0.0) {
        coeffs_e[0] = Complex64::new(1.0, 0.0);
    }
    let coeffs_v: Vec<Complex64> = (0..dim_v).map(|_| coeff(rng)).collect();
    (spec, TorusPoint::new(coeffs_v, coeffs_e))
}

pub fn random_integral_character(rng: &mut ChaCha20Rng, rank: usize) -> RatVec {
    RatVec::from_ints(
        &(0..rank)
            .map(|_| rng.gen_range(-4..=4))
            .collect::<Vec<i64>>(),
    )
}
