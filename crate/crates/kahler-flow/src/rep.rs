use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use torus_git::RepSpec;

use crate::{KahlerError, Result};

const ANTI_HERMITIAN_TOL: f64 = 1e-12;
const BRACKET_TOL: f64 = 1e-9;
const WEIGHT_TOL: f64 = 1e-9;

/// Unitary-compatible action data: matrices for an orthonormal basis of
/// the compact Lie algebra on the affine part and on the projective
/// part. Coordinates of the algebra are taken in this basis, so the
/// pairing on coefficient vectors is the identity.
#[derive(Debug, Clone)]
pub struct HermitianRep {
    dim_v: usize,
    dim_e: usize,
    act_v: Vec<DMatrix<Complex64>>,
    act_e: Vec<DMatrix<Complex64>>,
}

impl HermitianRep {
    pub fn new(
        dim_v: usize,
        dim_e: usize,
        act_v: Vec<DMatrix<Complex64>>,
        act_e: Vec<DMatrix<Complex64>>,
    ) -> Result<Self> {
        if act_v.is_empty() || act_v.len() != act_e.len() {
            return Err(KahlerError::EmptyBasis);
        }
        for (part, dim, mats) in [('v', dim_v, &act_v), ('e', dim_e, &act_e)] {
            for (index, a) in mats.iter().enumerate() {
                if a.nrows() != dim || a.ncols() != dim {
                    return Err(KahlerError::BadActionShape {
                        index,
                        part,
                        expected: dim,
                        got_rows: a.nrows(),
                        got_cols: a.ncols(),
                    });
                }
                let defect = (a + a.adjoint()).norm() / a.norm().max(1.0);
                if defect > ANTI_HERMITIAN_TOL {
                    return Err(KahlerError::NotAntiHermitian { index, part, defect });
                }
            }
        }
        let rep = HermitianRep {
            dim_v,
            dim_e,
            act_v,
            act_e,
        };
        rep.check_bracket_closure()?;
        Ok(rep)
    }

    pub fn d(&self) -> usize {
        self.act_v.len()
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn act_v(&self, k: usize) -> &DMatrix<Complex64> {
        &self.act_v[k]
    }

    pub fn act_e(&self, k: usize) -> &DMatrix<Complex64> {
        &self.act_e[k]
    }

    /// Action of the algebra element with the given coordinates.
    pub fn combine_v(&self, coords: &[f64]) -> DMatrix<Complex64> {
        combine(&self.act_v, coords, self.dim_v)
    }

    pub fn combine_e(&self, coords: &[f64]) -> DMatrix<Complex64> {
        combine(&self.act_e, coords, self.dim_e)
    }

    pub fn validate_state(&self, x: &StatePoint) -> Result<()> {
        if x.v.len() != self.dim_v {
            return Err(KahlerError::BadStateDim {
                part: 'v',
                expected: self.dim_v,
                got: x.v.len(),
            });
        }
        if x.m.len() != self.dim_e {
            return Err(KahlerError::BadStateDim {
                part: 'e',
                expected: self.dim_e,
                got: x.m.len(),
            });
        }
        Ok(())
    }

    /// Commutators of basis actions must lie in the real span of the
    /// basis actions, with one coefficient vector serving both parts.
    fn check_bracket_closure(&self) -> Result<()> {
        let d = self.d();
        for i in 0..d {
            for j in (i + 1)..d {
                let cv = &self.act_v[i] * &self.act_v[j] - &self.act_v[j] * &self.act_v[i];
                let ce = &self.act_e[i] * &self.act_e[j] - &self.act_e[j] * &self.act_e[i];
                let scale = (cv.norm().powi(2) + ce.norm().powi(2)).sqrt().max(1.0);
                let residual = self.span_residual(&cv, &ce) / scale;
                if residual > BRACKET_TOL {
                    return Err(KahlerError::BracketEscapesSpan { i, j, residual });
                }
            }
        }
        Ok(())
    }

    /// Distance from the block pair to the real span of the basis
    /// actions, and the best coefficients. Shared by the bracket check
    /// and the group-trajectory readout.
    pub(crate) fn project_onto_span(
        &self,
        target_v: &DMatrix<Complex64>,
        target_e: &DMatrix<Complex64>,
    ) -> (Vec<f64>, f64) {
        let d = self.d();
        let rows = 2 * (self.dim_v * self.dim_v + self.dim_e * self.dim_e);
        let mut a = DMatrix::<f64>::zeros(rows, d);
        for k in 0..d {
            let col = stack_real(&self.act_v[k], &self.act_e[k]);
            a.set_column(k, &col);
        }
        let b = stack_real(target_v, target_e);
        let svd = a.clone().svd(true, true);
        let coeffs = svd.solve(&b, 1e-14).expect("svd solve is infallible here");
        let residual = (&a * &coeffs - &b).norm();
        (coeffs.iter().copied().collect(), residual)
    }

    fn span_residual(&self, target_v: &DMatrix<Complex64>, target_e: &DMatrix<Complex64>) -> f64 {
        self.project_onto_span(target_v, target_e).1
    }
}

fn combine(mats: &[DMatrix<Complex64>], coords: &[f64], dim: usize) -> DMatrix<Complex64> {
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    for (c, a) in coords.iter().zip(mats) {
        acc += a * Complex64::new(*c, 0.0);
    }
    acc
}

fn stack_real(av: &DMatrix<Complex64>, ae: &DMatrix<Complex64>) -> DVector<f64> {
    let mut out = Vec::with_capacity(2 * (av.len() + ae.len()));
    for m in [av, ae] {
        for z in m.iter() {
            out.push(z.re);
            out.push(z.im);
        }
    }
    DVector::from_vec(out)
}

/// A point of V x P(E): the affine coordinates and a unit representative
/// of the projective line. Construction renormalizes the projective
/// part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct StatePoint {
    pub v: Vec<Complex64>,
    pub m: Vec<Complex64>,
}

impl StatePoint {
    pub fn new(v: Vec<Complex64>, m: Vec<Complex64>) -> Result<Self> {
        let norm = vec_norm(&m);
        if norm == 0.0 {
            return Err(KahlerError::ZeroProjectivePart);
        }
        let m = m.into_iter().map(|z| z / norm).collect();
        Ok(StatePoint { v, m })
    }

    /// Indicator state: ones on the listed slots, then normalized.
    pub fn from_slots(dim_v: usize, dim_e: usize, v_slots: &[usize], e_slots: &[usize]) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); dim_v];
        for &s in v_slots {
            v[s] = Complex64::new(1.0, 0.0);
        }
        let mut m = vec![Complex64::new(0.0, 0.0); dim_e];
        for &s in e_slots {
            m[s] = Complex64::new(1.0, 0.0);
        }
        StatePoint::new(v, m).expect("slot list is nonempty")
    }

    pub fn renormalized(&self) -> Self {
        StatePoint::new(self.v.clone(), self.m.clone()).expect("projective part stays nonzero")
    }
}

pub(crate) fn vec_norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Serialize, Deserialize)]
struct RawState {
    #[serde(default)]
    v: Vec<[f64; 2]>,
    m: Vec<[f64; 2]>,
}

impl TryFrom<RawState> for StatePoint {
    type Error = KahlerError;

    fn try_from(raw: RawState) -> Result<Self> {
        let unpack = |zs: Vec<[f64; 2]>| {
            zs.into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect::<Vec<_>>()
        };
        StatePoint::new(unpack(raw.v), unpack(raw.m))
    }
}

impl From<StatePoint> for RawState {
    fn from(x: StatePoint) -> Self {
        let pack = |zs: &[Complex64]| zs.iter().map(|z| [z.re, z.im]).collect();
        RawState {
            v: pack(&x.v),
            m: pack(&x.m),
        }
    }
}

/// How to fold a moment vector onto a dominant representative: indices
/// not covered by a triple are torus coordinates and stay fixed; each
/// su(2) triple (two ladder coordinates, then the Cartan coordinate) is
/// rotated onto its Cartan axis.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanSpec {
    #[serde(default)]
    pub su2_triples: Vec<[usize; 3]>,
}

impl CartanSpec {
    pub fn torus() -> Self {
        CartanSpec::default()
    }

    pub fn su2() -> Self {
        CartanSpec {
            su2_triples: vec![[0, 1, 2]],
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        let mut seen = vec![false; d];
        for triple in &self.su2_triples {
            for &idx in triple {
                if idx >= d {
                    return Err(KahlerError::BadCartanIndex { index: idx, len: d });
                }
                if seen[idx] {
                    return Err(KahlerError::BadCartanIndex { index: idx, len: d });
                }
                seen[idx] = true;
            }
        }
        Ok(())
    }

    pub fn dominant(&self, phi: &[f64]) -> Vec<f64> {
        let mut out = phi.to_vec();
        for [i, j, k] in &self.su2_triples {
            let r = (phi[*i] * phi[*i] + phi[*j] * phi[*j] + phi[*k] * phi[*k]).sqrt();
            out[*i] = 0.0;
            out[*j] = 0.0;
            out[*k] = r;
        }
        out
    }
}

/// Diagonal torus actions from a declared weight system. The algebra
/// basis is orthonormalized against the declared bilinear form, and the
/// basis vectors are returned for converting labels back to cocharacter
/// coordinates.
pub fn torus_rep(spec: &RepSpec) -> Result<(HermitianRep, Vec<Vec<f64>>)> {
    let rank = spec.rank();
    let gram = spec.form().gram_rows();
    let mut g = DMatrix::<f64>::zeros(rank, rank);
    for i in 0..rank {
        for j in 0..rank {
            g[(i, j)] = num::ToPrimitive::to_f64(&gram[i][j]).expect("gram entry fits in f64");
        }
    }
    let chol = g.cholesky().expect("declared form is positive definite");
    let l = chol.l();
    let mut basis = Vec::with_capacity(rank);
    for j in 0..rank {
        let mut e = DVector::<f64>::zeros(rank);
        e[j] = 1.0;
        let b = l.transpose().solve_upper_triangular(&e).expect("cholesky factor is invertible");
        basis.push(b.iter().copied().collect::<Vec<f64>>());
    }

    let slot_weights = |entries: &[torus_git::WeightEntry]| {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for entry in entries {
            let coords: Vec<f64> = entry.weight.to_f64();
            for _ in 0..entry.multiplicity {
                out.push(coords.clone());
            }
        }
        out
    };
    let weights_v = slot_weights(spec.weights_v());
    let weights_e = slot_weights(spec.weights_e());

    let diag_action = |weights: &[Vec<f64>], b: &[f64]| {
        let dim = weights.len();
        let mut a = DMatrix::<Complex64>::zeros(dim, dim);
        for (s, w) in weights.iter().enumerate() {
            let pairing: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
            a[(s, s)] = Complex64::new(0.0, pairing);
        }
        a
    };
    let act_v: Vec<_> = basis.iter().map(|b| diag_action(&weights_v, b)).collect();
    let act_e: Vec<_> = basis.iter().map(|b| diag_action(&weights_e, b)).collect();
    let rep = HermitianRep::new(weights_v.len(), weights_e.len(), act_v, act_e)?;
    Ok((rep, basis))
}

/// Block sums of symmetric powers of the defining representation of
/// su(2), in norm-orthonormalized monomial coordinates. Basis order:
/// the two ladder directions, then the Cartan direction, so the Cartan
/// pairing of the weight-w line is w in the third coordinate.
pub fn su2_block_rep(e_blocks: &[usize], v_blocks: &[usize]) -> Result<HermitianRep> {
    let build = |blocks: &[usize], which: usize| {
        let dim: usize = blocks.iter().map(|n| n + 1).sum();
        let mut a = DMatrix::<Complex64>::zeros(dim, dim);
        let mut base = 0;
        for &n in blocks {
            for k in 0..=n {
                match which {
                    0 => {
                        if k < n {
                            let lad = (((k + 1) * (n - k)) as f64).sqrt();
                            a[(base + k + 1, base + k)] = Complex64::new(0.0, lad);
                        }
                        if k >= 1 {
                            let lad = ((k * (n - k + 1)) as f64).sqrt();
                            a[(base + k - 1, base + k)] = Complex64::new(0.0, lad);
                        }
                    }
                    1 => {
                        if k < n {
                            let lad = (((k + 1) * (n - k)) as f64).sqrt();
                            a[(base + k + 1, base + k)] = Complex64::new(-lad, 0.0);
                        }
                        if k >= 1 {
                            let lad = ((k * (n - k + 1)) as f64).sqrt();
                            a[(base + k - 1, base + k)] = Complex64::new(lad, 0.0);
                        }
                    }
                    _ => {
                        let w = n as f64 - 2.0 * k as f64;
                        a[(base + k, base + k)] = Complex64::new(0.0, w);
                    }
                }
            }
            base += n + 1;
        }
        a
    };
    let act_v: Vec<_> = (0..3).map(|which| build(v_blocks, which)).collect();
    let act_e: Vec<_> = (0..3).map(|which| build(e_blocks, which)).collect();
    let dim_v = v_blocks.iter().map(|n| n + 1).sum();
    let dim_e = e_blocks.iter().map(|n| n + 1).sum();
    HermitianRep::new(dim_v, dim_e, act_v, act_e)
}

/// Checks that the listed basis indices act as a torus whose recovered
/// slot weights match the declared weight system: the actions must be
/// simultaneously diagonal in a common unitary basis, and each
/// recovered weight vector must match a declared weight paired against
/// the supplied cocharacter basis, with matching multiplicities.
pub fn verify_torus_weights(
    rep: &HermitianRep,
    idxs: &[usize],
    spec: &RepSpec,
    basis: &[Vec<f64>],
) -> Result<()> {
    for (part, dim, act) in [
        ('v', rep.dim_v, &rep.act_v),
        ('e', rep.dim_e, &rep.act_e),
    ] {
        if dim == 0 {
            continue;
        }
        let mut mix = DMatrix::<Complex64>::zeros(dim, dim);
        for (pos, &idx) in idxs.iter().enumerate() {
            let r = 1.0 + (pos as f64) * std::f64::consts::SQRT_2;
            mix += &act[idx] * Complex64::new(0.0, -r);
        }
        let eig = mix.symmetric_eigen();
        let u = eig.eigenvectors;
        let mut recovered: Vec<Vec<f64>> = Vec::with_capacity(dim);
        let mut mass = 0.0f64;
        for slot in 0..dim {
            let mut ws = Vec::with_capacity(idxs.len());
            for &idx in idxs {
                let h = &act[idx] * Complex64::new(0.0, -1.0);
                let transformed = u.adjoint() * &h * &u;
                for r in 0..dim {
                    if r != slot {
                        mass = mass.max(transformed[(r, slot)].norm());
                    }
                }
                ws.push(transformed[(slot, slot)].re);
            }
            recovered.push(ws);
        }
        if mass > 1e-8 {
            return Err(KahlerError::TorusNotDiagonalizable { mass });
        }

        let entries = if part == 'v' {
            spec.weights_v()
        } else {
            spec.weights_e()
        };
        let mut declared: Vec<Vec<f64>> = Vec::new();
        for entry in entries {
            let coords = entry.weight.to_f64();
            for _ in 0..entry.multiplicity {
                declared.push(
                    basis
                        .iter()
                        .map(|b| coords.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
                        .collect(),
                );
            }
        }
        if declared.len() != recovered.len() {
            return Err(KahlerError::WeightCountMismatch { part });
        }
        let mut used = vec![false; declared.len()];
        for (slot, ws) in recovered.iter().enumerate() {
            let found = declared.iter().enumerate().position(|(i, dw)| {
                !used[i] && dw.iter().zip(ws).all(|(a, b)| (a - b).abs() <= WEIGHT_TOL)
            });
            match found {
                Some(i) => used[i] = true,
                None => return Err(KahlerError::WeightMismatch { part, slot }),
            }
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct RawHermitianRep {
    dim_v: usize,
    dim_e: usize,
    act_v: Vec<Vec<Vec<[f64; 2]>>>,
    act_e: Vec<Vec<Vec<[f64; 2]>>>,
}

impl Serialize for HermitianRep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pack = |mats: &[DMatrix<Complex64>]| {
            mats.iter()
                .map(|a| {
                    (0..a.nrows())
                        .map(|r| (0..a.ncols()).map(|c| [a[(r, c)].re, a[(r, c)].im]).collect())
                        .collect()
                })
                .collect()
        };
        RawHermitianRep {
            dim_v: self.dim_v,
            dim_e: self.dim_e,
            act_v: pack(&self.act_v),
            act_e: pack(&self.act_e),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianRep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawHermitianRep::deserialize(d)?;
        let unpack = |mats: Vec<Vec<Vec<[f64; 2]>>>| {
            mats.into_iter()
                .map(|rows| {
                    let nrows = rows.len();
                    let ncols = rows.first().map_or(0, |r| r.len());
                    DMatrix::from_fn(nrows, ncols, |r, c| {
                        let [re, im] = rows[r][c];
                        Complex64::new(re, im)
                    })
                })
                .collect()
        };
        HermitianRep::new(raw.dim_v, raw.dim_e, unpack(raw.act_v), unpack(raw.act_e))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use torus_git::RepSpec;

    #[test]
    fn torus_rep_recovers_identity_form_weights() {
        let spec = RepSpec::simple(2, &[&[1, 0], &[0, -1]], &[&[2, 1]]).unwrap();
        let (rep, basis) = torus_rep(&spec).unwrap();
        assert_eq!(rep.d(), 2);
        assert_eq!(basis, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(rep.act_e(0)[(0, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(rep.act_e(1)[(1, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(rep.act_v(0)[(0, 0)], Complex64::new(0.0, 2.0));
        verify_torus_weights(&rep, &[0, 1], &spec, &basis).unwrap();
    }

    #[test]
    fn torus_basis_is_orthonormal_for_the_declared_form() {
        let spec = RepSpec::new(
            2,
            vec![torus_git::WeightEntry::from_ints(&[1, -1], 1)],
            vec![],
            ratgeom::InnerProductForm::new(vec![vec![2, 1], vec![1, 1]]).unwrap(),
        )
        .unwrap();
        let (_, basis) = torus_rep(&spec).unwrap();
        let g = [[2.0, 1.0], [1.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                let mut pair = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        pair += basis[i][a] * g[a][b] * basis[j][b];
                    }
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((pair - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn su2_blocks_validate_and_match_declared_weights() {
        let rep = su2_block_rep(&[2], &[1]).unwrap();
        assert_eq!(rep.d(), 3);
        let spec = RepSpec::simple(1, &[&[2], &[0], &[-2]], &[&[1], &[-1]]).unwrap();
        verify_torus_weights(&rep, &[2], &spec, &[vec![1.0]]).unwrap();
    }

    #[test]
    fn su2_ladder_entries_are_the_spin_coefficients() {
        let rep = su2_block_rep(&[2], &[]).unwrap();
        let a1 = rep.act_e(0);
        let s2 = 2.0f64.sqrt();
        assert!((a1[(1, 0)] - Complex64::new(0.0, s2)).norm() < 1e-14);
        assert!((a1[(2, 1)] - Complex64::new(0.0, s2)).norm() < 1e-14);
        assert!((a1[(0, 1)] - Complex64::new(0.0, s2)).norm() < 1e-14);
    }

    #[test]
    fn weight_mismatch_is_detected() {
        let rep = su2_block_rep(&[2], &[]).unwrap();
        let wrong = RepSpec::simple(1, &[&[2], &[1], &[-2]], &[]).unwrap();
        assert!(matches!(
            verify_torus_weights(&rep, &[2], &wrong, &[vec![1.0]]),
            Err(KahlerError::WeightMismatch { part: 'e', .. })
        ));
    }

    #[test]
    fn non_anti_hermitian_data_is_rejected() {
        let bad = DMatrix::from_row_slice(1, 1, &[Complex64::new(1.0, 0.0)]);
        let ok = DMatrix::from_row_slice(1, 1, &[Complex64::new(0.0, 1.0)]);
        assert!(matches!(
            HermitianRep::new(1, 1, vec![bad], vec![ok]),
            Err(KahlerError::NotAntiHermitian { part: 'v', .. })
        ));
    }

    #[test]
    fn bracket_escape_is_detected() {
        let z = DMatrix::<Complex64>::zeros(2, 2);
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
            ],
        );
        let b = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let err = HermitianRep::new(2, 2, vec![a, b], vec![z.clone(), z]);
        assert!(matches!(err, Err(KahlerError::BracketEscapesSpan { .. })));
    }

    #[test]
    fn state_points_renormalize_and_round_trip() {
        let x = StatePoint::new(
            vec![Complex64::new(3.0, 0.0)],
            vec![Complex64::new(3.0, 4.0)],
        )
        .unwrap();
        assert!((vec_norm(&x.m) - 1.0).abs() < 1e-15);
        let json = serde_json::to_string(&x).unwrap();
        let back: StatePoint = serde_json::from_str(&json).unwrap();
        assert_eq!(x, back);
        assert!(serde_json::from_str::<StatePoint>(r#"{"m":[[0,0]]}"#).is_err());
    }

    #[test]
    fn cartan_folding_rotates_su2_triples() {
        let spec = CartanSpec::su2();
        spec.validate(3).unwrap();
        let out = spec.dominant(&[3.0, 0.0, -4.0]);
        assert!((out[2] - 5.0).abs() < 1e-12);
        assert_eq!(out[0], 0.0);
        assert_eq!(out[1], 0.0);
        let torus = CartanSpec::torus();
        assert_eq!(torus.dominant(&[-2.0, 1.0]), vec![-2.0, 1.0]);
    }
}
