//! Conversions between the exact torus layer and the numerical flow
//! layer, plus the symmetric-power machinery used to run shifted
//! problems as flows.
//!
//! The flow layer works in unitary coordinates. Torus slot coefficients
//! already are unitary coordinates, so they pass through unchanged. For
//! block representations of the special linear group the natural
//! monomial coefficients are not: the degree-n block carries slot norms
//! 1/binomial(n, k), so coefficients are rescaled by the square roots
//! before a state is built.

use nalgebra::DMatrix;
use num::complex::Complex64;
use ratgeom::{InnerProductForm, RatVec};
use torus_git::{RepSpec, TorusPoint};

use group_git::Sl2Rep;
use kahler_flow::{su2_block_rep, HermitianRep, StatePoint};

use crate::family::{pair_weight, rational_f64, Sl2Instance};
use crate::Result;

/// Flow state of a torus instance point: coefficients pass through.
pub fn torus_state(x: &TorusPoint) -> Result<StatePoint> {
    Ok(StatePoint::new(x.coeffs_v.clone(), x.coeffs_e.clone())?)
}

/// Flow state of a block-representation point: monomial coefficients
/// rescaled to the unitary basis, blockwise.
pub fn sl2_state(rep: &Sl2Rep, x: &TorusPoint) -> Result<StatePoint> {
    Ok(StatePoint::new(
        orthonormal_part(&rep.v_blocks, &x.coeffs_v),
        orthonormal_part(&rep.e_blocks, &x.coeffs_e),
    )?)
}

fn orthonormal_part(blocks: &[usize], coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(coeffs.len());
    let mut base = 0;
    for &n in blocks {
        for k in 0..=n {
            out.push(coeffs[base + k] / binomial(n, k).sqrt());
        }
        base += n + 1;
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut num = 1.0f64;
    let mut den = 1.0f64;
    for i in 0..k.min(n - k) {
        num *= (n - i) as f64;
        den *= (i + 1) as f64;
    }
    num / den
}

/// Occupation vectors of the degree-`ell` symmetric power of a
/// `dim`-dimensional space, in the lexicographic order of sorted index
/// tuples. Degree zero has the single empty occupation.
pub fn occupations(dim: usize, ell: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut occ = vec![0usize; dim];
    fill(dim, ell, 0, &mut occ, &mut out);
    out
}

fn fill(dim: usize, left: usize, start: usize, occ: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if left == 0 {
        out.push(occ.clone());
        return;
    }
    for i in start..dim {
        occ[i] += 1;
        fill(dim, left - 1, i, occ, out);
        occ[i] -= 1;
    }
}

/// Number of occupation vectors without enumerating them.
pub fn occupation_count(dim: usize, ell: usize) -> usize {
    // binomial(dim + ell - 1, ell) stays small at desk scale
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 0..ell {
        num *= dim + i;
        den *= i + 1;
    }
    num / den
}

/// Induced action of a one-particle generator on the symmetric power,
/// in the unitary occupation basis. Diagonal entries pick up the
/// occupation number, ladder entries the square-root amplitudes of
/// bosonic creation and annihilation. The construction is a Lie algebra
/// homomorphism, so anti-Hermitian inputs with closed brackets stay
/// anti-Hermitian with closed brackets.
pub fn sym_power_action(a: &DMatrix<Complex64>, occs: &[Vec<usize>]) -> DMatrix<Complex64> {
    let dim = a.nrows();
    let size = occs.len();
    let index: std::collections::HashMap<&[usize], usize> = occs
        .iter()
        .enumerate()
        .map(|(i, o)| (o.as_slice(), i))
        .collect();
    let mut out = DMatrix::<Complex64>::zeros(size, size);
    let mut target = vec![0usize; dim];
    for (s_idx, s) in occs.iter().enumerate() {
        for j in 0..dim {
            if s[j] == 0 {
                continue;
            }
            out[(s_idx, s_idx)] += a[(j, j)] * s[j] as f64;
            for i in 0..dim {
                if i == j {
                    continue;
                }
                target.copy_from_slice(s);
                target[j] -= 1;
                target[i] += 1;
                let t_idx = index[target.as_slice()];
                let amp = ((s[j] * (s[i] + 1)) as f64).sqrt();
                out[(t_idx, s_idx)] += a[(i, j)] * amp;
            }
        }
    }
    out
}

/// Unitary-basis coordinates of the `ell`-th tensor power of a vector,
/// pushed into the symmetric power: the multinomial square root times
/// the coordinate monomial.
pub fn sym_power_state(v: &[Complex64], ell: usize, occs: &[Vec<usize>]) -> Vec<Complex64> {
    occs.iter()
        .map(|m| {
            let mut c = Complex64::new(multinomial(ell, m).sqrt(), 0.0);
            for (vi, &mi) in v.iter().zip(m) {
                for _ in 0..mi {
                    c *= vi;
                }
            }
            c
        })
        .collect()
}

fn multinomial(ell: usize, m: &[usize]) -> f64 {
    let mut value = 1.0f64;
    let mut used = 0usize;
    for &mi in m {
        for i in 0..mi {
            value *= (used + i + 1) as f64 / (i + 1) as f64;
        }
        used += mi;
    }
    debug_assert_eq!(used, ell);
    value
}

/// Generator of a tensor product action: a acting on the left factor
/// plus b on the right, with the left index major.
pub fn tensor_sum(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut out = DMatrix::<Complex64>::zeros(na * nb, na * nb);
    for i in 0..na {
        for k in 0..na {
            let aik = a[(i, k)];
            if aik != Complex64::new(0.0, 0.0) {
                for j in 0..nb {
                    out[(i * nb + j, k * nb + j)] += aik;
                }
            }
        }
    }
    for i in 0..na {
        for j in 0..nb {
            for l in 0..nb {
                out[(i * nb + j, i * nb + l)] += b[(j, l)];
            }
        }
    }
    out
}

/// The shifted problem of a block instance as a flow problem: the
/// projective part becomes its `ell`-th symmetric power tensored with
/// the degree-`h` twist block, the affine part is unchanged, and the
/// state is the power of the instance point paired with the highest
/// slot of the twist. Semistability of the flow from this state decides
/// membership of h/ell in the moment polyhedron of the closed Borel
/// orbit: the highest slot spans a Borel-stable line, so one point of
/// the orbit decides for the whole of it.
pub fn shifted_sl2_flow(
    inst: &Sl2Instance,
    ell: usize,
    h: usize,
) -> Result<(HermitianRep, StatePoint)> {
    let base = su2_block_rep(&inst.rep.e_blocks, &inst.rep.v_blocks)?;
    let twist = su2_block_rep(&[h], &[])?;
    let occs = occupations(base.dim_e(), ell);
    let act_e: Vec<DMatrix<Complex64>> = (0..3)
        .map(|k| {
            tensor_sum(
                &sym_power_action(base.act_e(k), &occs),
                twist.act_e(k),
            )
        })
        .collect();
    let act_v: Vec<DMatrix<Complex64>> = (0..3).map(|k| base.act_v(k).clone()).collect();
    let rep = HermitianRep::new(base.dim_v(), occs.len() * (h + 1), act_v, act_e)?;

    let unit = sl2_state(&inst.rep, &inst.point)?;
    let power = sym_power_state(&unit.m, ell, &occs);
    let mut m = vec![Complex64::new(0.0, 0.0); occs.len() * (h + 1)];
    for (i, c) in power.into_iter().enumerate() {
        m[i * (h + 1)] = c;
    }
    let state = StatePoint::new(unit.v.clone(), m)?;
    Ok((rep, state))
}

/// Sorted spectrum of an anti-Hermitian matrix, as the eigenvalues of
/// its Hermitian companion.
pub fn skew_spectrum(m: &DMatrix<Complex64>) -> Vec<f64> {
    let herm = m * Complex64::new(0.0, -1.0);
    let mut eig: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    eig
}

/// Coordinates of the metric dual of a rational direction in the
/// orthonormal Lie algebra basis of the flow layer.
pub fn direction_in_basis(
    form: &InnerProductForm,
    basis: &[Vec<f64>],
    tau: &RatVec,
) -> Vec<f64> {
    let flat: Vec<f64> = form.flat(tau).coords.iter().map(rational_f64).collect();
    basis
        .iter()
        .map(|b| b.iter().zip(&flat).map(|(bi, fi)| bi * fi).sum())
        .collect()
}

/// Exact pairings of every projective slot weight with a direction, in
/// slot order with multiplicity. These are the decay rates of the slot
/// coefficients along the direction's flow.
pub fn e_slot_rates(spec: &RepSpec, tau: &RatVec) -> Vec<f64> {
    let mut rates = Vec::with_capacity(spec.dim_e());
    for entry in spec.weights_e() {
        let rate = rational_f64(&pair_weight(&entry.weight, tau));
        for _ in 0..entry.multiplicity {
            rates.push(rate);
        }
    }
    rates
}
