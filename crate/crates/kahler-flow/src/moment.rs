use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::rep::{vec_norm, HermitianRep, StatePoint};
use crate::{KahlerError, Result};

const REALITY_TOL: f64 = 1e-12;
const EIGEN_POSITIVE_TOL: f64 = 1e-9;
const COMPONENT_TOL: f64 = 1e-10;

/// Hermitian pairing, conjugate linear in the second argument.
pub(crate) fn inner(u: &[Complex64], w: &[Complex64]) -> Complex64 {
    u.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

/// Moment map coordinates in the orthonormal algebra basis: the affine
/// part contributes (i/2)<Av, v>, the projective part the Fubini-Study
/// term i<Am, m>/<m, m>. Anti-Hermitian actions make each coordinate
/// real; a nonreal value means corrupted action data.
pub fn moment(rep: &HermitianRep, x: &StatePoint) -> Result<Vec<f64>> {
    rep.validate_state(x)?;
    let m_sq = inner(&x.m, &x.m).re;
    let mut phi = Vec::with_capacity(rep.d());
    for k in 0..rep.d() {
        let av = rep.act_v(k) * nalgebra::DVector::from_column_slice(&x.v);
        let v_term = Complex64::new(0.0, 0.5) * inner(av.as_slice(), &x.v);
        let am = rep.act_e(k) * nalgebra::DVector::from_column_slice(&x.m);
        let e_term = Complex64::new(0.0, 1.0) * inner(am.as_slice(), &x.m) / m_sq;
        let total = v_term + e_term;
        let defect = total.im.abs() / total.norm().max(1.0);
        if defect > REALITY_TOL {
            return Err(KahlerError::MomentNotReal { index: k, defect });
        }
        phi.push(total.re);
    }
    Ok(phi)
}

/// Half the squared norm of the moment map.
pub fn f_value(rep: &HermitianRep, x: &StatePoint) -> Result<f64> {
    let phi = moment(rep, x)?;
    Ok(0.5 * phi.iter().map(|c| c * c).sum::<f64>())
}

/// Riemannian gradient of f at a state point, split into the affine
/// component and the tangential projective component.
#[derive(Debug, Clone, PartialEq)]
pub struct GradF {
    pub v: Vec<Complex64>,
    pub m: Vec<Complex64>,
}

impl GradF {
    pub fn norm(&self) -> f64 {
        metric_pair(self, self).sqrt()
    }
}

/// Kahler metric pairing of two tangent vectors: the affine part is the
/// flat Hermitian metric, the projective part carries twice the
/// Fubini-Study normalization.
pub fn metric_pair(a: &GradF, b: &GradF) -> f64 {
    inner(&a.v, &b.v).re + 2.0 * inner(&a.m, &b.m).re
}

/// Gradient of f: the infinitesimal action of the moment value, with
/// the projective component projected onto the tangent space of the
/// unit representative.
pub fn grad_f(rep: &HermitianRep, x: &StatePoint) -> Result<GradF> {
    let phi = moment(rep, x)?;
    let i = Complex64::new(0.0, 1.0);
    let av = rep.combine_v(&phi) * nalgebra::DVector::from_column_slice(&x.v);
    let grad_v: Vec<Complex64> = av.iter().map(|z| i * z).collect();
    let am = rep.combine_e(&phi) * nalgebra::DVector::from_column_slice(&x.m);
    let u: Vec<Complex64> = am.iter().map(|z| i * z).collect();
    let m_sq = inner(&x.m, &x.m).re;
    let coeff = inner(&u, &x.m) / m_sq;
    let grad_m: Vec<Complex64> = u.iter().zip(&x.m).map(|(a, b)| a - coeff * b).collect();
    Ok(GradF {
        v: grad_v,
        m: grad_m,
    })
}

/// Asymptotic moment pairing along a one-parameter direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VarpiPhi {
    NegInfinity,
    Finite(f64),
}

impl VarpiPhi {
    pub fn is_neg_infinity(&self) -> bool {
        matches!(self, VarpiPhi::NegInfinity)
    }
}

/// Limit of <Phi(exp(it lambda) x), lambda> as t grows: minus infinity
/// when the affine part has a component expanding under the flow,
/// otherwise minus the top surviving projective eigenvalue.
pub fn varpi_phi(rep: &HermitianRep, x: &StatePoint, lambda: &[f64]) -> Result<VarpiPhi> {
    rep.validate_state(x)?;
    if lambda.iter().all(|c| *c == 0.0) {
        return Err(KahlerError::ZeroDirection);
    }
    let minus_i = Complex64::new(0.0, -1.0);

    if rep.dim_v() > 0 {
        let h = rep.combine_v(lambda) * minus_i;
        let eig = h.symmetric_eigen();
        let comps = eig.eigenvectors.adjoint() * nalgebra::DVector::from_column_slice(&x.v);
        let v_scale = vec_norm(&x.v);
        for (a, c) in eig.eigenvalues.iter().zip(comps.iter()) {
            if *a > EIGEN_POSITIVE_TOL && c.norm() > COMPONENT_TOL * v_scale {
                return Ok(VarpiPhi::NegInfinity);
            }
        }
    }

    let h = rep.combine_e(lambda) * minus_i;
    let eig = h.symmetric_eigen();
    let comps = eig.eigenvectors.adjoint() * nalgebra::DVector::from_column_slice(&x.m);
    let m_scale = vec_norm(&x.m);
    let mut top: Option<f64> = None;
    for (a, c) in eig.eigenvalues.iter().zip(comps.iter()) {
        if c.norm() > COMPONENT_TOL * m_scale {
            top = Some(top.map_or(*a, |t: f64| t.max(*a)));
        }
    }
    Ok(VarpiPhi::Finite(
        -top.expect("projective part is a unit vector"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::torus_rep;
    use torus_git::RepSpec;

    fn circle_pm() -> HermitianRep {
        let spec = RepSpec::simple(1, &[&[1], &[-1]], &[]).unwrap();
        torus_rep(&spec).unwrap().0
    }

    #[test]
    fn moment_at_the_plus_weight_line_is_minus_one() {
        let rep = circle_pm();
        let x = StatePoint::from_slots(0, 2, &[], &[0]);
        assert_eq!(moment(&rep, &x).unwrap(), vec![-1.0]);
        assert_eq!(f_value(&rep, &x).unwrap(), 0.5);
        let g = grad_f(&rep, &x).unwrap();
        assert!(g.norm() < 1e-15);
    }

    #[test]
    fn moment_of_the_balanced_line_vanishes() {
        let rep = circle_pm();
        let x = StatePoint::from_slots(0, 2, &[], &[0, 1]);
        assert_eq!(moment(&rep, &x).unwrap(), vec![0.0]);
    }

    #[test]
    fn affine_moment_scales_with_the_squared_norm()  {
        let spec = RepSpec::simple(1, &[&[0]], &[&[1]]).unwrap();
        let (rep, _) = torus_rep(&spec).unwrap();
        let x = StatePoint::new(
            vec![Complex64::new(2.0f64.sqrt(), 0.0)],
            vec![Complex64::new(1.0, 0.0)],
        )
        .unwrap();
        let phi = moment(&rep, &x).unwrap();
        assert!((phi[0] - (-1.0)).abs() < 1e-15);
    }

    #[test]
    fn varpi_matches_the_weight_line_values() {
        let rep = circle_pm();
        let x = StatePoint::from_slots(0, 2, &[], &[0]);
        assert_eq!(varpi_phi(&rep, &x, &[1.0]).unwrap(), VarpiPhi::Finite(-1.0));
        assert_eq!(varpi_phi(&rep, &x, &[-1.0]).unwrap(), VarpiPhi::Finite(1.0));
        assert!(varpi_phi(&rep, &x, &[0.0]).is_err());
    }

    #[test]
    fn expanding_affine_directions_give_negative_infinity() {
        let spec = RepSpec::simple(1, &[&[0]], &[&[1]]).unwrap();
        let (rep, _) = torus_rep(&spec).unwrap();
        let x = StatePoint::new(
            vec![Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0)],
        )
        .unwrap();
        assert!(varpi_phi(&rep, &x, &[1.0]).unwrap().is_neg_infinity());
        assert_eq!(varpi_phi(&rep, &x, &[-1.0]).unwrap(), VarpiPhi::Finite(0.0));
    }

    #[test]
    fn gradient_projection_is_tangent_to_the_sphere() {
        let rep = crate::rep::su2_block_rep(&[3], &[1]).unwrap();
        let x = StatePoint::new(
            vec![Complex64::new(0.3, -0.1), Complex64::new(0.0, 0.7)],
            vec![
                Complex64::new(1.0, 0.5),
                Complex64::new(-0.25, 0.0),
                Complex64::new(0.0, 2.0),
                Complex64::new(0.1, 0.1),
            ],
        )
        .unwrap();
        let g = grad_f(&rep, &x).unwrap();
        assert!(inner(&g.m, &x.m).norm() < 1e-14);
    }
}
