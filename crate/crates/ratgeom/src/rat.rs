use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::str::FromStr;

use crate::{RatGeomError, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator (the `Ratio` constructor maintains both).
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical string form: "p" for integers, "p/q" otherwise.
pub fn rational_to_string(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|_| RatGeomError::BadRational(s.to_string()))
}

/// Dense rational vector. Coordinates are plain data; all pairings go through
/// either the canonical dot product or an [`InnerProductForm`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatVec {
    pub coords: Vec<Rational>,
}

impl RatVec {
    pub fn new(coords: Vec<Rational>) -> Self {
        RatVec { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        RatVec {
            coords: coords.iter().map(|&c| rat_int(c)).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        RatVec {
            coords: vec![Rational::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &RatVec) -> RatVec {
        debug_assert_eq!(self.dim(), other.dim());
        RatVec {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RatVec) -> RatVec {
        debug_assert_eq!(self.dim(), other.dim());
        RatVec {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> RatVec {
        RatVec {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> RatVec {
        RatVec {
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    /// Canonical pairing sum_i a_i b_i (a weight against a one-parameter
    /// subgroup needs no form).
    pub fn dot(&self, other: &RatVec) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Smallest integer vector with the same direction (positive scaling
    /// only; the direction is preserved). Zero maps to zero.
    pub fn primitive(&self) -> RatVec {
        if self.is_zero() {
            return self.clone();
        }
        let mut lcm = BigInt::one();
        for c in &self.coords {
            lcm = num::integer::lcm(lcm, c.denom().clone());
        }
        let ints: Vec<BigInt> = self
            .coords
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let mut gcd = BigInt::zero();
        for v in &ints {
            gcd = num::integer::gcd(gcd, v.abs());
        }
        RatVec {
            coords: ints
                .into_iter()
                .map(|v| Rational::from_integer(v / &gcd))
                .collect(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords
            .iter()
            .map(|c| {
                let n = c.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
                let d = c.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
                n / d
            })
            .collect()
    }

    pub fn strings(&self) -> Vec<String> {
        self.coords.iter().map(rational_to_string).collect()
    }

    pub fn from_strings(strs: &[String]) -> Result<Self> {
        let coords = strs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(RatVec { coords })
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.denom().is_one())
    }
}

impl serde::Serialize for RatVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coords.iter().map(rational_to_string))
    }
}

impl<'de> serde::Deserialize<'de> for RatVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strs: Vec<String> = serde::Deserialize::deserialize(d)?;
        RatVec::from_strings(&strs).map_err(serde::de::Error::custom)
    }
}

/// Symmetric positive-definite integer Gram matrix. The determinant and
/// adjugate are precomputed so that the inverse form (needed on the dual
/// space) stays exact: G^-1 = adj(G) / det(G).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerProductForm {
    gram: Vec<Vec<BigInt>>,
    det: BigInt,
    adj: Vec<Vec<BigInt>>,
}

fn det_bigint(m: &[Vec<BigInt>]) -> BigInt {
    // Fraction-free Gaussian elimination (Bareiss); exact on integers.
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !a[i][k].is_zero());
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if sign > 0 {
        a[n - 1][n - 1].clone()
    } else {
        -a[n - 1][n - 1].clone()
    }
}

impl InnerProductForm {
    pub fn new(gram_rows: Vec<Vec<i64>>) -> Result<Self> {
        let gram: Vec<Vec<BigInt>> = gram_rows
            .into_iter()
            .map(|row| row.into_iter().map(BigInt::from).collect())
            .collect();
        Self::from_bigint(gram)
    }

    pub fn from_bigint(gram: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 {
            return Err(RatGeomError::ZeroRank);
        }
        if gram.iter().any(|row| row.len() != n) {
            return Err(RatGeomError::FormNotSymmetric);
        }
        for (i, row) in gram.iter().enumerate() {
            for (j, entry) in row.iter().enumerate().take(i) {
                if *entry != gram[j][i] {
                    return Err(RatGeomError::FormNotSymmetric);
                }
            }
        }
        // Sylvester's criterion: every leading principal minor positive.
        for k in 1..=n {
            let minor: Vec<Vec<BigInt>> =
                (0..k).map(|i| gram[i][0..k].to_vec()).collect();
            if det_bigint(&minor) <= BigInt::zero() {
                return Err(RatGeomError::FormNotPositiveDefinite { minor: k });
            }
        }
        let det = det_bigint(&gram);
        let adj = adjugate(&gram);
        Ok(InnerProductForm { gram, det, adj })
    }

    pub fn identity(rank: usize) -> Self {
        let gram: Vec<Vec<i64>> = (0..rank)
            .map(|i| (0..rank).map(|j| if i == j { 1 } else { 0 }).collect())
            .collect();
        Self::new(gram).expect("identity gram is positive definite")
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn is_identity(&self) -> bool {
        let n = self.rank();
        (0..n).all(|i| {
            (0..n).all(|j| {
                if i == j {
                    self.gram[i][j].is_one()
                } else {
                    self.gram[i][j].is_zero()
                }
            })
        })
    }

    pub fn gram_rows(&self) -> &[Vec<BigInt>] {
        &self.gram
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    /// u^T G v.
    pub fn pair(&self, u: &RatVec, v: &RatVec) -> Rational {
        debug_assert_eq!(u.dim(), self.rank());
        debug_assert_eq!(v.dim(), self.rank());
        let mut acc = Rational::zero();
        for (i, ui) in u.coords.iter().enumerate() {
            for (j, vj) in v.coords.iter().enumerate() {
                acc += ui * vj * Rational::from_integer(self.gram[i][j].clone());
            }
        }
        acc
    }

    pub fn norm_sq(&self, v: &RatVec) -> Rational {
        self.pair(v, v)
    }

    /// Pairing in the inverse form: u^T G^-1 v (the induced form on the dual
    /// space).
    pub fn dual_pair(&self, u: &RatVec, v: &RatVec) -> Rational {
        let mut acc = Rational::zero();
        for (i, ui) in u.coords.iter().enumerate() {
            for (j, vj) in v.coords.iter().enumerate() {
                acc += ui * vj * Rational::from_integer(self.adj[i][j].clone());
            }
        }
        acc / Rational::from_integer(self.det.clone())
    }

    pub fn dual_norm_sq(&self, v: &RatVec) -> Rational {
        self.dual_pair(v, v)
    }

    /// G^-1 xi: identifies a dual vector (weight) with a Lie-algebra vector.
    pub fn sharp(&self, xi: &RatVec) -> RatVec {
        debug_assert_eq!(xi.dim(), self.rank());
        let det = Rational::from_integer(self.det.clone());
        let coords = (0..self.rank())
            .map(|i| {
                let mut acc = Rational::zero();
                for (j, xj) in xi.coords.iter().enumerate() {
                    acc += xj * Rational::from_integer(self.adj[i][j].clone());
                }
                acc / &det
            })
            .collect();
        RatVec { coords }
    }

    /// G tau: identifies a Lie-algebra vector with a dual vector (character).
    pub fn flat(&self, tau: &RatVec) -> RatVec {
        debug_assert_eq!(tau.dim(), self.rank());
        let coords = (0..self.rank())
            .map(|i| {
                let mut acc = Rational::zero();
                for (j, tj) in tau.coords.iter().enumerate() {
                    acc += tj * Rational::from_integer(self.gram[i][j].clone());
                }
                acc
            })
            .collect();
        RatVec { coords }
    }

    /// The adjugate as a form in its own right: adj(G) = det(G) G^-1 is
    /// integral, symmetric and positive definite, and induces the same
    /// minimizers as G^-1 (distances scale by det(G)).
    pub fn adjugate_form(&self) -> InnerProductForm {
        InnerProductForm::from_bigint(self.adj.clone())
            .expect("adjugate of a positive-definite gram is positive definite")
    }
}

fn adjugate(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![BigInt::one()]];
    }
    // Row j of the adjugate holds the cofactors of column j.
    (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let sub: Vec<Vec<BigInt>> = (0..n)
                        .filter(|&r| r != i)
                        .map(|r| {
                            (0..n)
                                .filter(|&c| c != j)
                                .map(|c| m[r][c].clone())
                                .collect()
                        })
                        .collect();
                    let cof = det_bigint(&sub);
                    if (i + j) % 2 == 0 {
                        cof
                    } else {
                        -cof
                    }
                })
                .collect()
        })
        .collect()
}

impl serde::Serialize for InnerProductForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .gram
            .iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for InnerProductForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = serde::Deserialize::deserialize(d)?;
        let gram = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        BigInt::from_str(s.trim())
                            .map_err(|_| serde::de::Error::custom(format!("bad integer {s:?}")))
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        InnerProductForm::from_bigint(gram).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_string_round_trip() {
        for s in ["3", "-3", "0", "1/2", "-7/3", "22/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(rational_to_string(&r), s);
        }
        // Non-canonical input parses to the reduced form.
        assert_eq!(rational_to_string(&parse_rational("4/2").unwrap()), "2");
    }

    #[test]
    fn primitive_direction() {
        let v = RatVec::new(vec![rat(2, 3), rat(-4, 3)]);
        assert_eq!(v.primitive(), RatVec::from_ints(&[1, -2]));
        assert!(RatVec::zero(2).primitive().is_zero());
    }

    #[test]
    fn form_validation() {
        assert!(InnerProductForm::new(vec![vec![1, 0], vec![0, 1]]).is_ok());
        assert!(InnerProductForm::new(vec![vec![1, 2], vec![0, 1]]).is_err());
        assert!(InnerProductForm::new(vec![vec![0, 0], vec![0, 1]]).is_err());
        assert!(InnerProductForm::new(vec![vec![-1, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn sharp_flat_inverse() {
        let g = InnerProductForm::new(vec![vec![2, 1], vec![1, 3]]).unwrap();
        let xi = RatVec::from_ints(&[4, -1]);
        let tau = g.sharp(&xi);
        assert_eq!(g.flat(&tau), xi);
        // |xi|^2 in the dual form equals |sharp(xi)|^2 in the form.
        assert_eq!(g.dual_norm_sq(&xi), g.norm_sq(&tau));
    }

    #[test]
    fn adjugate_scales_dual_form() {
        let g = InnerProductForm::new(vec![vec![2, 1], vec![1, 3]]).unwrap();
        let adj = g.adjugate_form();
        let v = RatVec::from_ints(&[3, 5]);
        let det = Rational::from_integer(g.det().clone());
        assert_eq!(adj.norm_sq(&v), g.dual_norm_sq(&v) * det);
    }
}
