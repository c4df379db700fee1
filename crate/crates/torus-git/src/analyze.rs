use std::cmp::Ordering;

use num::{BigRational, Signed};
use serde::{Deserialize, Serialize};

use ratgeom::{in_cone, min_norm_point, RatVec, Rational, VPolyhedron};

use crate::rep::{OneParamSubgroupQ, RepSpec, TorusPoint};
use crate::Result;

/// Outcome of the exact semistability test. `VStable` is the regime where
/// no one-parameter limit of the V-part exists at all, so the relative
/// invariant is identically minus infinity; it takes precedence over the
/// plain membership test.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Semistable,
    VStable,
    Unstable {
        msq: Rational,
        tau_x: OneParamSubgroupQ,
    },
}

impl Verdict {
    pub fn is_unstable(&self) -> bool {
        matches!(self, Verdict::Unstable { .. })
    }
}

/// conv(E-support weights) + cone(V-support weights). Zero V-weights are
/// dropped from the ray list; they do not change the set.
pub fn weight_polyhedron(spec: &RepSpec, x: &TorusPoint) -> Result<VPolyhedron> {
    spec.validate_point(x)?;
    let points = spec.e_support(x);
    let rays: Vec<RatVec> = spec
        .v_support(x)
        .into_iter()
        .filter(|w| !w.is_zero())
        .collect();
    Ok(VPolyhedron::new(spec.rank(), points, rays)?)
}

/// Negative of the largest pairing of `tau` against the E-support. This is
/// positive exactly when the E-part converges to zero along `tau`.
pub fn varpi_e(spec: &RepSpec, x: &TorusPoint, tau: &OneParamSubgroupQ) -> Result<Rational> {
    spec.validate_point(x)?;
    spec.validate_direction(tau)?;
    let max = spec
        .e_support(x)
        .iter()
        .map(|w| tau.pair_weight(w))
        .max()
        .expect("E-support is nonempty for a valid point");
    Ok(-max)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarpiValue {
    NegInfinity,
    Finite(Rational),
}

impl VarpiValue {
    pub fn is_positive(&self) -> bool {
        matches!(self, VarpiValue::Finite(v) if v.is_positive())
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            VarpiValue::Finite(v) => Some(v),
            VarpiValue::NegInfinity => None,
        }
    }
}

/// The relative invariant of a direction, together with the squared length
/// of the direction so that callers can compare the normalized quantity
/// value / |tau| without leaving exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarpiRel {
    pub value: VarpiValue,
    pub tau_norm_sq: Rational,
}

impl VarpiRel {
    /// Exact comparison of value / sqrt(tau_norm_sq) between two
    /// directions. NegInfinity compares below every finite value.
    pub fn normalized_cmp(&self, other: &VarpiRel) -> Ordering {
        use VarpiValue::*;
        match (&self.value, &other.value) {
            (NegInfinity, NegInfinity) => Ordering::Equal,
            (NegInfinity, Finite(_)) => Ordering::Less,
            (Finite(_), NegInfinity) => Ordering::Greater,
            (Finite(a), Finite(b)) => {
                let sign_cmp = a.signum().cmp(&b.signum());
                if sign_cmp != Ordering::Equal {
                    return sign_cmp;
                }
                // Same sign: compare a^2/na against b^2/nb, flipping for
                // negatives since squaring reverses their order.
                let lhs = a * a * &other.tau_norm_sq;
                let rhs = b * b * &self.tau_norm_sq;
                if a.is_negative() {
                    rhs.cmp(&lhs)
                } else {
                    lhs.cmp(&rhs)
                }
            }
        }
    }
}

/// Relative invariant: NegInfinity when some V-support weight pairs
/// strictly positively with `tau` (no limit of the V-part), otherwise the
/// E-part invariant.
pub fn varpi_rel(spec: &RepSpec, x: &TorusPoint, tau: &OneParamSubgroupQ) -> Result<VarpiRel> {
    spec.validate_point(x)?;
    spec.validate_direction(tau)?;
    let norm_sq = tau.norm_sq(spec.form());
    let v_escapes = spec
        .v_support(x)
        .iter()
        .any(|w| tau.pair_weight(w).is_positive());
    let value = if v_escapes {
        VarpiValue::NegInfinity
    } else {
        VarpiValue::Finite(varpi_e(spec, x, tau)?)
    };
    Ok(VarpiRel {
        value,
        tau_norm_sq: norm_sq,
    })
}

/// True when the V-support weights positively span the whole weight space,
/// so every nonzero direction sends some V-coefficient off to infinity.
fn v_stable(spec: &RepSpec, x: &TorusPoint) -> bool {
    let rays = spec.v_support(x);
    if rays.is_empty() {
        return false;
    }
    (0..spec.rank()).all(|i| {
        let mut e = RatVec::zero(spec.rank());
        e.coords[i] = Rational::from_integer(1.into());
        let mut neg = e.clone();
        neg.coords[i] = -neg.coords[i].clone();
        in_cone(&rays, &e) && in_cone(&rays, &neg)
    })
}

/// Exact semistability verdict. The minimum-norm computation runs against
/// the adjugate of the form, which is integral, and the squared distance
/// is rescaled by the determinant afterwards; the argmin is unaffected.
/// The optimal direction is the negated sharp of the nearest point, so
/// its form-squared-length equals `msq` exactly.
pub fn analyze(spec: &RepSpec, x: &TorusPoint) -> Result<Verdict> {
    let p = weight_polyhedron(spec, x)?;
    if v_stable(spec, x) {
        return Ok(Verdict::VStable);
    }
    if p.contains_origin() {
        return Ok(Verdict::Semistable);
    }
    let adj = spec.form().adjugate_form();
    let mn = min_norm_point(&p, &adj)?;
    let det = BigRational::from_integer(spec.form().det().clone());
    let msq = mn.sqdist / det;
    let tau_x = OneParamSubgroupQ::new(spec.form().sharp(&mn.argmin).neg());
    Ok(Verdict::Unstable { msq, tau_x })
}

/// Stratum labels: all semistable points (including the V-stable regime)
/// share the open stratum; unstable points are labelled by their exact
/// optimal direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StratumLabel {
    Semistable,
    Unstable(OneParamSubgroupQ),
}

pub fn stratum_label(spec: &RepSpec, x: &TorusPoint) -> Result<StratumLabel> {
    Ok(match analyze(spec, x)? {
        Verdict::Semistable | Verdict::VStable => StratumLabel::Semistable,
        Verdict::Unstable { tau_x, .. } => StratumLabel::Unstable(tau_x),
    })
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = match self {
            Verdict::Semistable => RawVerdict {
                status: "semistable".into(),
                msq: None,
                tau_x: None,
            },
            Verdict::VStable => RawVerdict {
                status: "vstable".into(),
                msq: None,
                tau_x: None,
            },
            Verdict::Unstable { msq, tau_x } => RawVerdict {
                status: "unstable".into(),
                msq: Some(ratgeom::rational_to_string(msq)),
                tau_x: Some(tau_x.direction.strings()),
            },
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RawVerdict::deserialize(d)?;
        match raw.status.as_str() {
            "semistable" => Ok(Verdict::Semistable),
            "vstable" => Ok(Verdict::VStable),
            "unstable" => {
                let msq = raw
                    .msq
                    .ok_or_else(|| D::Error::custom("unstable verdict requires msq"))?;
                let tau = raw
                    .tau_x
                    .ok_or_else(|| D::Error::custom("unstable verdict requires tau_x"))?;
                Ok(Verdict::Unstable {
                    msq: ratgeom::parse_rational(&msq).map_err(D::Error::custom)?,
                    tau_x: OneParamSubgroupQ::new(
                        RatVec::from_strings(&tau).map_err(D::Error::custom)?,
                    ),
                })
            }
            other => Err(D::Error::custom(format!("unknown verdict status {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawVerdict {
    status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    msq: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau_x: Option<Vec<String>>,
}
