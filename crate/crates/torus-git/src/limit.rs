use num::complex::Complex64;
use num::{Signed, Zero};

use ratgeom::Rational;

use crate::rep::{OneParamSubgroupQ, RepSpec, TorusPoint, WeightEntry};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Limit {
    Exists(TorusPoint),
    DoesNotExist,
}

/// Limit of `x` along `tau` as the parameter goes to zero. The V-part
/// keeps exactly the coefficients whose weights pair to zero with `tau`
/// (strictly negative pairings decay, strictly positive ones escape); the
/// E-part is projective, so it keeps the coefficients attaining the
/// maximal pairing over the support.
pub fn limit(spec: &RepSpec, x: &TorusPoint, tau: &OneParamSubgroupQ) -> Result<Limit> {
    spec.validate_point(x)?;
    spec.validate_direction(tau)?;

    let mut coeffs_v = vec![Complex64::zero(); spec.dim_v()];
    let mut slot = 0;
    for entry in spec.weights_v() {
        let pairing = tau.pair_weight(&entry.weight);
        for k in 0..entry.multiplicity {
            let c = x.coeffs_v[slot + k];
            if c.is_zero() {
                continue;
            }
            if pairing.is_positive() {
                return Ok(Limit::DoesNotExist);
            }
            if pairing.is_zero() {
                coeffs_v[slot + k] = c;
            }
        }
        slot += entry.multiplicity;
    }

    let top = max_support_pairing(spec.weights_e(), &x.coeffs_e, tau);
    let mut coeffs_e = vec![Complex64::zero(); spec.dim_e()];
    let mut slot = 0;
    for entry in spec.weights_e() {
        if tau.pair_weight(&entry.weight) == top {
            coeffs_e[slot..slot + entry.multiplicity]
                .copy_from_slice(&x.coeffs_e[slot..slot + entry.multiplicity]);
        }
        slot += entry.multiplicity;
    }

    Ok(Limit::Exists(TorusPoint::new(coeffs_v, coeffs_e)))
}

fn max_support_pairing(
    entries: &[WeightEntry],
    coeffs: &[Complex64],
    tau: &OneParamSubgroupQ,
) -> Rational {
    let mut best: Option<Rational> = None;
    let mut slot = 0;
    for entry in entries {
        let live = coeffs[slot..slot + entry.multiplicity]
            .iter()
            .any(|c| !c.is_zero());
        slot += entry.multiplicity;
        if live {
            let p = tau.pair_weight(&entry.weight);
            if best.as_ref().map(|b| p > *b).unwrap_or(true) {
                best = Some(p);
            }
        }
    }
    best.expect("E-support is nonempty for a valid point")
}
