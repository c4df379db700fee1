use num::complex::Complex64;
use num::integer::lcm;
use num::bigint::BigInt;
use num::{One, ToPrimitive, Zero};

use ratgeom::{RatVec, Rational};
use torus_git::{OneParamSubgroupQ, RepSpec, TorusPoint, WeightEntry};

use crate::{GroupGitError, GroupSpec, Result};

/// Character dual to a one-parameter subgroup direction: the form applied
/// to the direction, together with the least positive integer clearing
/// its denominators.
pub fn tau_flat(g: &GroupSpec, tau: &OneParamSubgroupQ) -> Result<(u32, RatVec)> {
    if tau.is_zero() {
        return Err(GroupGitError::ZeroDirection);
    }
    let character = g.form().flat(&tau.direction);
    let mut ell = BigInt::one();
    for c in &character.coords {
        ell = lcm(ell, c.denom().clone());
    }
    let ell = ell.to_u32().expect("denominators at desk scale");
    Ok((ell, character))
}

/// Weights of the shifted problem: every size-`ell` multiset sum of
/// E-slot weights plus every weight of the twisting irrep, in slot order
/// (multiset index) * irrep_len + irrep_index. Multisets run over slots
/// in lexicographic order of their sorted index tuples; all new entries
/// have multiplicity one. The V-part is unchanged.
pub fn shift_rep(
    spec: &RepSpec,
    g: &GroupSpec,
    ell: u32,
    lambda: &RatVec,
    irrep_weights: &[RatVec],
) -> Result<RepSpec> {
    if ell == 0 {
        return Err(GroupGitError::ZeroShiftMultiplier);
    }
    if !g.is_dominant(lambda) {
        return Err(GroupGitError::NonDominantShift);
    }
    let highest = lambda.scale(&Rational::from_integer(ell.into()));
    if !highest.is_integral() {
        return Err(GroupGitError::NonIntegralShift);
    }
    if !irrep_weights.contains(&highest) {
        return Err(GroupGitError::MissingHighestWeight);
    }
    let slot_weights = e_slot_weights(spec);
    let mut weights_e = Vec::new();
    for multiset in multisets(slot_weights.len(), ell as usize) {
        let sym_weight = multiset
            .iter()
            .fold(RatVec::zero(spec.rank()), |acc, &slot| {
                acc.add(slot_weights[slot])
            });
        for mu in irrep_weights {
            weights_e.push(WeightEntry::new(sym_weight.add(mu), 1));
        }
    }
    Ok(RepSpec::new(
        spec.rank(),
        weights_e,
        spec.weights_v().to_vec(),
        spec.form().clone(),
    )?)
}

/// Index of the highest weight `ell * lambda` inside the irrep weight
/// list, for use as the twisting slot of [`shift_point`].
pub fn find_highest_slot(irrep_weights: &[RatVec], ell: u32, lambda: &RatVec) -> Result<usize> {
    let highest = lambda.scale(&Rational::from_integer(ell.into()));
    irrep_weights
        .iter()
        .position(|mu| *mu == highest)
        .ok_or(GroupGitError::MissingHighestWeight)
}

/// The shifted point: the `ell`-th power of the E-part in the monomial
/// convention (multinomial coefficients, no orthonormalization), placed
/// on the `highest_slot` line of the twisting irrep. Slot order matches
/// [`shift_rep`].
pub fn shift_point(
    spec: &RepSpec,
    x: &TorusPoint,
    ell: u32,
    irrep_len: usize,
    highest_slot: usize,
) -> Result<TorusPoint> {
    if ell == 0 {
        return Err(GroupGitError::ZeroShiftMultiplier);
    }
    if highest_slot >= irrep_len {
        return Err(GroupGitError::BadIrrepSlot {
            slot: highest_slot,
            len: irrep_len,
        });
    }
    spec.validate_point(x)?;
    let dim_e = spec.dim_e();
    let sets = multisets(dim_e, ell as usize);
    let mut coeffs_e = vec![Complex64::zero(); sets.len() * irrep_len];
    for (mi, multiset) in sets.iter().enumerate() {
        let mut coeff = Complex64::new(multinomial(multiset, ell as usize), 0.0);
        for &slot in multiset {
            coeff *= x.coeffs_e[slot];
        }
        coeffs_e[mi * irrep_len + highest_slot] = coeff;
    }
    Ok(TorusPoint::new(x.coeffs_v.clone(), coeffs_e))
}

fn e_slot_weights(spec: &RepSpec) -> Vec<&RatVec> {
    let mut out = Vec::with_capacity(spec.dim_e());
    for entry in spec.weights_e() {
        for _ in 0..entry.multiplicity {
            out.push(&entry.weight);
        }
    }
    out
}

/// Sorted index tuples of size `ell` over `0..dim`, lexicographic.
fn multisets(dim: usize, ell: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(ell);
    fn rec(dim: usize, ell: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == ell {
            out.push(current.clone());
            return;
        }
        for i in start..dim {
            current.push(i);
            rec(dim, ell, i, current, out);
            current.pop();
        }
    }
    rec(dim, ell, 0, &mut current, &mut out);
    out
}

/// ell! / (product of repetition factorials) for a sorted index tuple.
fn multinomial(multiset: &[usize], ell: usize) -> f64 {
    let mut result = factorial(ell);
    let mut run = 1usize;
    for i in 1..=multiset.len() {
        if i < multiset.len() && multiset[i] == multiset[i - 1] {
            run += 1;
        } else {
            result /= factorial(run);
            run = 1;
        }
    }
    result
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ratgeom::{rat, InnerProductForm};

    #[test]
    fn tau_flat_applies_the_form_and_clears_denominators() {
        let torus1 = GroupSpec::torus(InnerProductForm::identity(1));
        let torus2 = GroupSpec::torus(InnerProductForm::identity(2));
        let (ell, chi) = tau_flat(&torus2, &OneParamSubgroupQ::from_ints(&[1, 0])).unwrap();
        assert_eq!((ell, chi), (1, RatVec::from_ints(&[1, 0])));

        let skew = GroupSpec::torus(InnerProductForm::new(vec![vec![2, 0], vec![0, 1]]).unwrap());
        let (ell, chi) = tau_flat(&skew, &OneParamSubgroupQ::from_ints(&[1, 0])).unwrap();
        assert_eq!((ell, chi), (1, RatVec::from_ints(&[2, 0])));

        let half = OneParamSubgroupQ::new(RatVec::new(vec![rat(1, 2)]));
        let (ell, chi) = tau_flat(&torus1, &half).unwrap();
        assert_eq!((ell, chi), (2, RatVec::new(vec![rat(1, 2)])));

        let zero = OneParamSubgroupQ::new(RatVec::zero(1));
        assert!(tau_flat(&torus1, &zero).is_err());
    }

    #[test]
    fn torus_shift_expands_symmetric_powers() {
        let spec = RepSpec::simple(1, &[&[1], &[-1]], &[]).unwrap();
        let g = GroupSpec::torus(InnerProductForm::identity(1));
        let lambda = RatVec::from_ints(&[3]);
        let irrep = [RatVec::from_ints(&[6])];
        let shifted = shift_rep(&spec, &g, 2, &lambda, &irrep).unwrap();
        let weights: Vec<i64> = shifted
            .weights_e()
            .iter()
            .map(|e| e.weight.coords[0].to_integer().to_i64().unwrap())
            .collect();
        assert_eq!(weights, vec![8, 6, 4]);
    }

    #[test]
    fn trivial_shift_keeps_the_weights() {
        let spec = RepSpec::simple(2, &[&[1, 0], &[0, -1]], &[&[1, 1]]).unwrap();
        let g = GroupSpec::torus(InnerProductForm::identity(2));
        let lambda = RatVec::zero(2);
        let irrep = [RatVec::zero(2)];
        let shifted = shift_rep(&spec, &g, 1, &lambda, &irrep).unwrap();
        assert_eq!(shifted.weights_e().len(), spec.weights_e().len());
        for (a, b) in shifted.weights_e().iter().zip(spec.weights_e()) {
            assert_eq!(a.weight, b.weight);
        }
        assert_eq!(shifted.weights_v(), spec.weights_v());
    }

    #[test]
    fn sl2_shift_forms_pairwise_sums() {
        let spec = RepSpec::simple(1, &[&[1], &[-1]], &[]).unwrap();
        let g = GroupSpec::sl2();
        let lambda = RatVec::from_ints(&[2]);
        let irrep = [
            RatVec::from_ints(&[2]),
            RatVec::from_ints(&[0]),
            RatVec::from_ints(&[-2]),
        ];
        let shifted = shift_rep(&spec, &g, 1, &lambda, &irrep).unwrap();
        let weights: Vec<i64> = shifted
            .weights_e()
            .iter()
            .map(|e| e.weight.coords[0].to_integer().to_i64().unwrap())
            .collect();
        assert_eq!(weights, vec![3, 1, -1, 1, -1, -3]);
    }

    #[test]
    fn shift_point_expands_multinomials() {
        let spec = RepSpec::simple(1, &[&[1], &[-1]], &[]).unwrap();
        let a = Complex64::new(2.0, 0.0);
        let b = Complex64::new(0.0, 3.0);
        let x = TorusPoint::new(vec![], vec![a, b]);
        let shifted = shift_point(&spec, &x, 2, 1, 0).unwrap();
        assert_eq!(shifted.coeffs_e, vec![a * a, 2.0 * a * b, b * b]);
    }

    #[test]
    fn shift_point_single_slot_is_a_pure_power() {
        let spec = RepSpec::simple(1, &[&[1], &[-1]], &[]).unwrap();
        let x = TorusPoint::from_slots(&spec, &[], &[1]);
        let shifted = shift_point(&spec, &x, 3, 2, 1).unwrap();
        // Multisets of size 3 over two slots: 000, 001, 011, 111; only the
        // last survives, twisted onto irrep slot 1 of 2.
        let mut expected = vec![Complex64::zero(); 8];
        expected[3 * 2 + 1] = Complex64::new(1.0, 0.0);
        assert_eq!(shifted.coeffs_e, expected);
    }

    #[test]
    fn unit_shift_copies_coefficients() {
        let spec = RepSpec::simple(1, &[&[1], &[-1]], &[&[0]]).unwrap();
        let x = TorusPoint::new(
            vec![Complex64::new(0.5, 0.5)],
            vec![Complex64::new(1.0, -1.0), Complex64::new(2.0, 0.0)],
        );
        let shifted = shift_point(&spec, &x, 1, 1, 0).unwrap();
        assert_eq!(shifted.coeffs_e, x.coeffs_e);
        assert_eq!(shifted.coeffs_v, x.coeffs_v);
    }

    #[test]
    fn non_dominant_shift_character_is_rejected() {
        let spec = RepSpec::simple(1, &[&[1]], &[]).unwrap();
        let g = GroupSpec::sl2();
        let lambda = RatVec::from_ints(&[-1]);
        let irrep = [RatVec::from_ints(&[-1]), RatVec::from_ints(&[1])];
        assert!(matches!(
            shift_rep(&spec, &g, 1, &lambda, &irrep),
            Err(GroupGitError::NonDominantShift)
        ));
    }
}
