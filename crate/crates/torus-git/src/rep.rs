use num::complex::Complex64;
use num::Zero;
use serde::{Deserialize, Serialize};

use ratgeom::{InnerProductForm, RatVec, Rational};

use crate::{Result, TorusGitError};

/// One isotypic piece of the weight decomposition: an integer weight
/// vector together with the dimension of its weight space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightEntry {
    pub weight: RatVec,
    pub multiplicity: usize,
}

impl WeightEntry {
    pub fn new(weight: RatVec, multiplicity: usize) -> Self {
        WeightEntry {
            weight,
            multiplicity,
        }
    }

    pub fn from_ints(weight: &[i64], multiplicity: usize) -> Self {
        WeightEntry::new(RatVec::from_ints(weight), multiplicity)
    }
}

/// Weight data of a torus representation on V x P(E): the list of
/// E-weights, the list of V-weights, and the inner product form on the
/// Lie algebra used to measure destabilizing directions.
///
/// Coefficient slots are indexed by entry order, copies of one entry
/// consecutive, so entry `i` occupies slots `slot_base(i) .. slot_base(i)
/// + multiplicity`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepSpec {
    rank: usize,
    weights_e: Vec<WeightEntry>,
    weights_v: Vec<WeightEntry>,
    form: InnerProductForm,
}

impl RepSpec {
    pub fn new(
        rank: usize,
        weights_e: Vec<WeightEntry>,
        weights_v: Vec<WeightEntry>,
        form: InnerProductForm,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(TorusGitError::ZeroRank);
        }
        if weights_e.is_empty() {
            return Err(TorusGitError::NoEWeights);
        }
        if form.rank() != rank {
            return Err(TorusGitError::FormRankMismatch {
                form: form.rank(),
                rank,
            });
        }
        for entry in weights_e.iter().chain(weights_v.iter()) {
            if entry.weight.dim() != rank {
                return Err(TorusGitError::WeightDim {
                    expected: rank,
                    got: entry.weight.dim(),
                });
            }
            if !entry.weight.is_integral() {
                return Err(TorusGitError::NonIntegralWeight);
            }
            if entry.multiplicity == 0 {
                return Err(TorusGitError::ZeroMultiplicity);
            }
        }
        Ok(RepSpec {
            rank,
            weights_e,
            weights_v,
            form,
        })
    }

    /// Identity form, all multiplicities 1. The common case in tests and
    /// random instance generation.
    pub fn simple(rank: usize, weights_e: &[&[i64]], weights_v: &[&[i64]]) -> Result<Self> {
        RepSpec::new(
            rank,
            weights_e
                .iter()
                .map(|w| WeightEntry::from_ints(w, 1))
                .collect(),
            weights_v
                .iter()
                .map(|w| WeightEntry::from_ints(w, 1))
                .collect(),
            InnerProductForm::identity(rank),
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights_e(&self) -> &[WeightEntry] {
        &self.weights_e
    }

    pub fn weights_v(&self) -> &[WeightEntry] {
        &self.weights_v
    }

    pub fn form(&self) -> &InnerProductForm {
        &self.form
    }

    pub fn dim_e(&self) -> usize {
        self.weights_e.iter().map(|e| e.multiplicity).sum()
    }

    pub fn dim_v(&self) -> usize {
        self.weights_v.iter().map(|e| e.multiplicity).sum()
    }

    /// First coefficient slot of E-entry `idx`.
    pub fn slot_base_e(&self, idx: usize) -> usize {
        self.weights_e[..idx].iter().map(|e| e.multiplicity).sum()
    }

    /// First coefficient slot of V-entry `idx`.
    pub fn slot_base_v(&self, idx: usize) -> usize {
        self.weights_v[..idx].iter().map(|e| e.multiplicity).sum()
    }

    pub fn validate_point(&self, x: &TorusPoint) -> Result<()> {
        if x.coeffs_v.len() != self.dim_v() {
            return Err(TorusGitError::SlotCount {
                part: 'V',
                expected: self.dim_v(),
                got: x.coeffs_v.len(),
            });
        }
        if x.coeffs_e.len() != self.dim_e() {
            return Err(TorusGitError::SlotCount {
                part: 'E',
                expected: self.dim_e(),
                got: x.coeffs_e.len(),
            });
        }
        if x.coeffs_e.iter().all(|c| c.is_zero()) {
            return Err(TorusGitError::EmptyESupport);
        }
        Ok(())
    }

    pub fn validate_direction(&self, tau: &OneParamSubgroupQ) -> Result<()> {
        if tau.direction.dim() != self.rank {
            return Err(TorusGitError::DirectionDim {
                expected: self.rank,
                got: tau.direction.dim(),
            });
        }
        if tau.direction.is_zero() {
            return Err(TorusGitError::ZeroDirection);
        }
        Ok(())
    }

    /// Distinct E-weights carrying a nonzero coefficient of `x`.
    pub fn e_support(&self, x: &TorusPoint) -> Vec<RatVec> {
        support(&self.weights_e, &x.coeffs_e)
    }

    /// Distinct V-weights carrying a nonzero coefficient of `x`.
    pub fn v_support(&self, x: &TorusPoint) -> Vec<RatVec> {
        support(&self.weights_v, &x.coeffs_v)
    }
}

fn support(entries: &[WeightEntry], coeffs: &[Complex64]) -> Vec<RatVec> {
    let mut out: Vec<RatVec> = Vec::new();
    let mut slot = 0;
    for entry in entries {
        let live = coeffs[slot..slot + entry.multiplicity]
            .iter()
            .any(|c| !c.is_zero());
        slot += entry.multiplicity;
        if live && !out.contains(&entry.weight) {
            out.push(entry.weight.clone());
        }
    }
    out
}

impl Serialize for RepSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawRepSpec {
            rank: self.rank,
            weights_e: self.weights_e.iter().map(raw_entry).collect(),
            weights_v: self.weights_v.iter().map(raw_entry).collect(),
            form: self.form.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RepSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawRepSpec::deserialize(d)?;
        let entry = |r: &RawWeightEntry| WeightEntry::from_ints(&r.weight, r.multiplicity);
        RepSpec::new(
            raw.rank,
            raw.weights_e.iter().map(entry).collect(),
            raw.weights_v.iter().map(entry).collect(),
            raw.form,
        )
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RawRepSpec {
    rank: usize,
    weights_e: Vec<RawWeightEntry>,
    #[serde(default)]
    weights_v: Vec<RawWeightEntry>,
    form: InnerProductForm,
}

#[derive(Serialize, Deserialize)]
struct RawWeightEntry {
    weight: Vec<i64>,
    #[serde(default = "one")]
    multiplicity: usize,
}

fn one() -> usize {
    1
}

fn raw_entry(e: &WeightEntry) -> RawWeightEntry {
    RawWeightEntry {
        weight: e
            .weight
            .coords
            .iter()
            .map(|c| {
                use num::ToPrimitive;
                c.to_integer().to_i64().expect("weights fit in i64")
            })
            .collect(),
        multiplicity: e.multiplicity,
    }
}

/// A point of V x P(E), stored as one complex coefficient per slot. The
/// E-part is a projective representative, so overall scaling of
/// `coeffs_e` is immaterial.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    pub coeffs_v: Vec<Complex64>,
    pub coeffs_e: Vec<Complex64>,
}

impl TorusPoint {
    pub fn new(coeffs_v: Vec<Complex64>, coeffs_e: Vec<Complex64>) -> Self {
        TorusPoint { coeffs_v, coeffs_e }
    }

    /// Unit coefficient on each listed slot, zero elsewhere.
    pub fn from_slots(spec: &RepSpec, v_slots: &[usize], e_slots: &[usize]) -> Self {
        let mut coeffs_v = vec![Complex64::zero(); spec.dim_v()];
        let mut coeffs_e = vec![Complex64::zero(); spec.dim_e()];
        for &s in v_slots {
            coeffs_v[s] = Complex64::new(1.0, 0.0);
        }
        for &s in e_slots {
            coeffs_e[s] = Complex64::new(1.0, 0.0);
        }
        TorusPoint { coeffs_v, coeffs_e }
    }

    /// Unit coefficient on the first copy of each listed weight entry.
    pub fn from_entries(spec: &RepSpec, v_entries: &[usize], e_entries: &[usize]) -> Self {
        let v_slots: Vec<usize> = v_entries.iter().map(|&i| spec.slot_base_v(i)).collect();
        let e_slots: Vec<usize> = e_entries.iter().map(|&i| spec.slot_base_e(i)).collect();
        TorusPoint::from_slots(spec, &v_slots, &e_slots)
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawPoint {
            v: self.coeffs_v.iter().map(|c| [c.re, c.im]).collect(),
            e: self.coeffs_e.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPoint::deserialize(d)?;
        let lift = |p: &[f64; 2]| Complex64::new(p[0], p[1]);
        Ok(TorusPoint {
            coeffs_v: raw.v.iter().map(lift).collect(),
            coeffs_e: raw.e.iter().map(lift).collect(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    #[serde(default)]
    v: Vec<[f64; 2]>,
    e: Vec<[f64; 2]>,
}

/// A rational one-parameter subgroup direction in the Lie algebra of the
/// torus, under the usual identification with the cocharacter lattice
/// tensored with Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OneParamSubgroupQ {
    pub direction: RatVec,
}

impl OneParamSubgroupQ {
    pub fn new(direction: RatVec) -> Self {
        OneParamSubgroupQ { direction }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        OneParamSubgroupQ::new(RatVec::from_ints(coords))
    }

    pub fn is_zero(&self) -> bool {
        self.direction.is_zero()
    }

    /// Squared length under the given form on the Lie algebra.
    pub fn norm_sq(&self, form: &InnerProductForm) -> Rational {
        form.norm_sq(&self.direction)
    }

    /// Pairing with a weight, independent of any form.
    pub fn pair_weight(&self, weight: &RatVec) -> Rational {
        weight.dot(&self.direction)
    }
}
