use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use ratgeom::{InnerProductForm, RatVec};
use torus_git::{RepSpec, TorusPoint, WeightEntry};

use crate::{GroupSpec, Result};

/// Torus weights of the degree-n symmetric power of the defining
/// two-dimensional representation, monomial basis. Slot k carries
/// a^{n-k} b^k with weight n - 2k; slot 0 is the highest weight.
pub fn sl2_sym_weights(n: usize) -> Vec<i64> {
    (0..=n).map(|k| n as i64 - 2 * k as i64).collect()
}

/// Matrix of the unipotent u(s): a -> a, b -> s a + b on the monomial
/// basis of the degree-n symmetric power. Entry [row][col] sends slot
/// col = k to slot row = k - j with coefficient C(k, j) s^j, so the
/// matrix is upper triangular with unit diagonal.
pub fn sl2_sym_unipotent(n: usize, s: f64) -> Vec<Vec<f64>> {
    let dim = n + 1;
    let mut m = vec![vec![0.0; dim]; dim];
    for k in 0..dim {
        for j in 0..=k {
            m[k - j][k] = binomial(k, j) * s.powi(j as i32);
        }
    }
    m
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// A concrete SL2 instance: direct sums of symmetric powers on both the
/// projective part and the affine part, listed by highest weight. The
/// slot layout of the induced RepSpec is block-contiguous in list
/// order, each block in monomial-basis order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sl2Rep {
    pub e_blocks: Vec<usize>,
    pub v_blocks: Vec<usize>,
}

impl Sl2Rep {
    pub fn new(e_blocks: Vec<usize>, v_blocks: Vec<usize>) -> Self {
        Sl2Rep { e_blocks, v_blocks }
    }

    pub fn group(&self) -> GroupSpec {
        GroupSpec::sl2()
    }

    pub fn dim_e(&self) -> usize {
        self.e_blocks.iter().map(|n| n + 1).sum()
    }

    pub fn dim_v(&self) -> usize {
        self.v_blocks.iter().map(|n| n + 1).sum()
    }

    pub fn rep_spec(&self) -> Result<RepSpec> {
        let entries = |blocks: &[usize]| {
            blocks
                .iter()
                .flat_map(|&n| sl2_sym_weights(n))
                .map(|w| WeightEntry::new(RatVec::from_ints(&[w]), 1))
                .collect::<Vec<_>>()
        };
        Ok(RepSpec::new(
            1,
            entries(&self.e_blocks),
            entries(&self.v_blocks),
            InnerProductForm::identity(1),
        )?)
    }

    /// Applies u(s) blockwise to both coefficient parts.
    pub fn act(&self, s: f64, x: &TorusPoint) -> TorusPoint {
        TorusPoint::new(
            act_blocks(&self.v_blocks, s, &x.coeffs_v),
            act_blocks(&self.e_blocks, s, &x.coeffs_e),
        )
    }
}

fn act_blocks(blocks: &[usize], s: f64, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(coeffs.len());
    let mut base = 0;
    for &n in blocks {
        let dim = n + 1;
        let m = sl2_sym_unipotent(n, s);
        for row in &m {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, entry) in row.iter().enumerate() {
                acc += entry * coeffs[base + k];
            }
            out.push(acc);
        }
        base += dim;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_weights_descend_by_two_from_the_highest() {
        assert_eq!(sl2_sym_weights(0), vec![0]);
        assert_eq!(sl2_sym_weights(1), vec![1, -1]);
        assert_eq!(sl2_sym_weights(2), vec![2, 0, -2]);
        assert_eq!(sl2_sym_weights(5), vec![5, 3, 1, -1, -3, -5]);
    }

    #[test]
    fn unipotent_at_zero_is_the_identity() {
        for n in 0..5 {
            let m = sl2_sym_unipotent(n, 0.0);
            for (r, row) in m.iter().enumerate() {
                for (c, entry) in row.iter().enumerate() {
                    assert_eq!(*entry, if r == c { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn quadratic_columns_match_the_binomial_expansion() {
        let s = 0.5;
        let m = sl2_sym_unipotent(2, s);
        assert_eq!(m[0], vec![1.0, s, s * s]);
        assert_eq!(m[1], vec![0.0, 1.0, 2.0 * s]);
        assert_eq!(m[2], vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn unipotents_form_a_one_parameter_group() {
        for n in 1..4 {
            let (s, t) = (0.7, -1.3);
            let a = sl2_sym_unipotent(n, s);
            let b = sl2_sym_unipotent(n, t);
            let c = sl2_sym_unipotent(n, s + t);
            for r in 0..=n {
                for q in 0..=n {
                    let prod: f64 = (0..=n).map(|k| a[r][k] * b[k][q]).sum();
                    assert!((prod - c[r][q]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn acting_on_the_lowest_weight_line_fills_the_highest_slot() {
        let rep = Sl2Rep::new(vec![1], vec![]);
        let spec = rep.rep_spec().unwrap();
        let x = TorusPoint::from_slots(&spec, &[], &[1]);
        let y = rep.act(2.0, &x);
        assert_eq!(y.coeffs_e[0], Complex64::new(2.0, 0.0));
        assert_eq!(y.coeffs_e[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn highest_weight_lines_are_fixed() {
        let rep = Sl2Rep::new(vec![3], vec![2]);
        let spec = rep.rep_spec().unwrap();
        let x = TorusPoint::from_slots(&spec, &[0], &[0]);
        let y = rep.act(-1.7, &x);
        assert_eq!(y.coeffs_e, x.coeffs_e);
        assert_eq!(y.coeffs_v, x.coeffs_v);
    }

    #[test]
    fn rep_spec_concatenates_blocks_in_order() {
        let rep = Sl2Rep::new(vec![1, 2], vec![0]);
        let spec = rep.rep_spec().unwrap();
        let e: Vec<i64> = spec
            .weights_e()
            .iter()
            .map(|w| w.weight.coords[0].to_integer().try_into().unwrap())
            .collect();
        assert_eq!(e, vec![1, -1, 2, 0, -2]);
        assert_eq!(spec.dim_v(), 1);
        assert_eq!(rep.dim_e(), 5);
    }

    #[test]
    fn action_is_blockwise() {
        let rep = Sl2Rep::new(vec![1, 1], vec![]);
        let spec = rep.rep_spec().unwrap();
        let x = TorusPoint::from_slots(&spec, &[], &[1, 3]);
        let y = rep.act(1.0, &x);
        assert_eq!(y.coeffs_e[0], Complex64::new(1.0, 0.0));
        assert_eq!(y.coeffs_e[1], Complex64::new(1.0, 0.0));
        assert_eq!(y.coeffs_e[2], Complex64::new(1.0, 0.0));
        assert_eq!(y.coeffs_e[3], Complex64::new(1.0, 0.0));
    }
}
