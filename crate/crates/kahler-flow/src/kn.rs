use num::complex::Complex64;

use crate::rep::{HermitianRep, StatePoint};
use crate::{KahlerError, Result};

/// Kempf-Ness data along the geodesic exp(it A(lambda)) x: the value
/// relative to t = 0, the first derivative, and the second derivative,
/// all in closed form from the eigendecomposition of the direction.
///
/// The value is a quarter of the squared affine norm plus the log of
/// the unnormalized projective norm. Its derivative is the moment
/// pairing with the direction at the moved point, and the second
/// derivative is the squared speed of the induced vector field, so it
/// is nonnegative and the value is convex in t.
pub fn kempf_ness(
    rep: &HermitianRep,
    x: &StatePoint,
    lambda: &[f64],
    t: f64,
) -> Result<(f64, f64, f64)> {
    rep.validate_state(x)?;
    if lambda.len() != rep.d() {
        return Err(KahlerError::BadStateDim {
            part: 'k',
            expected: rep.d(),
            got: lambda.len(),
        });
    }
    if lambda.iter().all(|c| *c == 0.0) {
        return Err(KahlerError::ZeroDirection);
    }
    let minus_i = Complex64::new(0.0, -1.0);

    let mut value = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;

    if rep.dim_v() > 0 {
        let h = rep.combine_v(lambda) * minus_i;
        let eig = h.symmetric_eigen();
        let comps = eig.eigenvectors.adjoint() * nalgebra::DVector::from_column_slice(&x.v);
        let mut norm_now = 0.0;
        let mut norm_start = 0.0;
        for (a, c) in eig.eigenvalues.iter().zip(comps.iter()) {
            let w = c.norm_sqr();
            let scaled = w * (-2.0 * a * t).exp();
            norm_now += scaled;
            norm_start += w;
            first += -0.5 * a * scaled;
            second += a * a * scaled;
        }
        value += 0.25 * (norm_now - norm_start);
    }

    let h = rep.combine_e(lambda) * minus_i;
    let eig = h.symmetric_eigen();
    let comps = eig.eigenvectors.adjoint() * nalgebra::DVector::from_column_slice(&x.m);
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    let mut start = 0.0;
    for (a, c) in eig.eigenvalues.iter().zip(comps.iter()) {
        let w = c.norm_sqr();
        let scaled = w * (-2.0 * a * t).exp();
        d0 += scaled;
        d1 += a * scaled;
        d2 += a * a * scaled;
        start += w;
    }
    value += 0.5 * (d0.ln() - start.ln());
    first += -d1 / d0;
    second += 2.0 * (d2 * d0 - d1 * d1) / (d0 * d0);

    Ok((value, first, second))
}
