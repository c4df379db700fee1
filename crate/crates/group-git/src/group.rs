use num::bigint::BigInt;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use ratgeom::{from_halfspaces, InnerProductForm, RatVec, Rational, VPolyhedron};

use crate::{GroupGitError, Result};

type IMatrix = Vec<Vec<i64>>;

/// Root and Weyl data of a compact connected group with a fixed maximal
/// torus, living on the character side: positive roots are weight-space
/// vectors, Weyl elements act on weight coordinates, and dominance is
/// measured with the inverse of the Lie-algebra form.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    rank: usize,
    positive_roots: Vec<RatVec>,
    weyl_elements: Vec<IMatrix>,
    form: InnerProductForm,
}

impl GroupSpec {
    pub fn new(
        rank: usize,
        positive_roots: Vec<RatVec>,
        weyl_elements: Vec<IMatrix>,
        form: InnerProductForm,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(GroupGitError::ZeroRank);
        }
        if form.rank() != rank {
            return Err(GroupGitError::FormRankMismatch {
                form: form.rank(),
                rank,
            });
        }
        for root in &positive_roots {
            if root.dim() != rank || root.is_zero() {
                return Err(GroupGitError::BadRoot);
            }
        }
        for w in &weyl_elements {
            if w.len() != rank || w.iter().any(|row| row.len() != rank) {
                return Err(GroupGitError::BadWeylShape);
            }
        }
        let spec = GroupSpec {
            rank,
            positive_roots,
            weyl_elements,
            form,
        };
        spec.check_weyl()?;
        Ok(spec)
    }

    /// Torus of the given form: no roots, trivial Weyl group.
    pub fn torus(form: InnerProductForm) -> Self {
        let rank = form.rank();
        GroupSpec {
            rank,
            positive_roots: vec![],
            weyl_elements: vec![identity_matrix(rank)],
            form,
        }
    }

    /// SL2 with the defining-representation weight normalization: the
    /// positive root is twice the fundamental weight, the Weyl group is
    /// the sign flip, and the form is the standard one.
    pub fn sl2() -> Self {
        GroupSpec {
            rank: 1,
            positive_roots: vec![RatVec::from_ints(&[2])],
            weyl_elements: vec![vec![vec![1]], vec![vec![-1]]],
            form: InnerProductForm::identity(1),
        }
    }

    /// Direct product: block sums of roots, Weyl elements, and forms.
    pub fn product(factors: &[GroupSpec]) -> Result<Self> {
        let rank: usize = factors.iter().map(|f| f.rank).sum();
        if rank == 0 {
            return Err(GroupGitError::ZeroRank);
        }
        let mut roots = Vec::new();
        let mut offset = 0;
        for f in factors {
            for root in &f.positive_roots {
                let mut coords = vec![Rational::zero(); rank];
                coords[offset..offset + f.rank].clone_from_slice(&root.coords);
                roots.push(RatVec::new(coords));
            }
            offset += f.rank;
        }
        let mut weyl = vec![identity_matrix(rank)];
        for (i, f) in factors.iter().enumerate() {
            let base: usize = factors[..i].iter().map(|g| g.rank).sum();
            let mut extended = Vec::new();
            for w in &weyl {
                for fw in &f.weyl_elements {
                    let mut m = w.clone();
                    for r in 0..f.rank {
                        for c in 0..f.rank {
                            m[base + r][base + c] = fw[r][c];
                        }
                    }
                    extended.push(m);
                }
            }
            weyl = extended;
            weyl.dedup();
        }
        let mut gram = vec![vec![BigInt::zero(); rank]; rank];
        let mut offset = 0;
        for f in factors {
            for r in 0..f.rank {
                for c in 0..f.rank {
                    gram[offset + r][offset + c] = f.form.gram_rows()[r][c].clone();
                }
            }
            offset += f.rank;
        }
        GroupSpec::new(
            rank,
            roots,
            weyl,
            InnerProductForm::from_bigint(gram)?,
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn positive_roots(&self) -> &[RatVec] {
        &self.positive_roots
    }

    pub fn weyl_elements(&self) -> &[IMatrix] {
        &self.weyl_elements
    }

    pub fn form(&self) -> &InnerProductForm {
        &self.form
    }

    /// Nonnegative pairing against every positive root, in the inverse
    /// form on the character side.
    pub fn is_dominant(&self, xi: &RatVec) -> bool {
        self.positive_roots
            .iter()
            .all(|alpha| !self.form.dual_pair(alpha, xi).is_negative())
    }

    /// The unique dominant vector in the Weyl orbit of `xi`.
    pub fn dominant_representative(&self, xi: &RatVec) -> Result<RatVec> {
        for w in &self.weyl_elements {
            let moved = apply(w, xi);
            if self.is_dominant(&moved) {
                return Ok(moved);
            }
        }
        Err(GroupGitError::NoDominantTranslate)
    }

    /// Dominant chamber on the character side as a polyhedral cone.
    pub fn chamber(&self) -> Result<VPolyhedron> {
        let rows: Vec<RatVec> = self
            .positive_roots
            .iter()
            .map(|alpha| {
                let mut coords = self.form.sharp(alpha).coords;
                coords.push(Rational::zero());
                RatVec::new(coords)
            })
            .collect();
        Ok(from_halfspaces(self.rank, &rows)?)
    }

    /// Weyl elements must form a finite group of isometries of the dual
    /// form: identity present, closed under products, inverses present.
    fn check_weyl(&self) -> Result<()> {
        if self.weyl_elements.is_empty()
            || !self.weyl_elements.contains(&identity_matrix(self.rank))
        {
            return Err(GroupGitError::WeylNotClosed);
        }
        let adj = adjugate_rows(&self.form);
        for w in &self.weyl_elements {
            if !preserves(w, &adj) {
                return Err(GroupGitError::WeylFormViolation);
            }
            if !self
                .weyl_elements
                .iter()
                .any(|v| multiply(w, v) == identity_matrix(self.rank))
            {
                return Err(GroupGitError::WeylNotClosed);
            }
            for v in &self.weyl_elements {
                if !self.weyl_elements.contains(&multiply(w, v)) {
                    return Err(GroupGitError::WeylNotClosed);
                }
            }
        }
        Ok(())
    }
}

fn identity_matrix(rank: usize) -> IMatrix {
    (0..rank)
        .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn multiply(a: &IMatrix, b: &IMatrix) -> IMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn apply(w: &IMatrix, xi: &RatVec) -> RatVec {
    RatVec::new(
        w.iter()
            .map(|row| {
                row.iter()
                    .zip(&xi.coords)
                    .map(|(a, x)| Rational::from_integer((*a).into()) * x)
                    .sum()
            })
            .collect(),
    )
}

fn adjugate_rows(form: &InnerProductForm) -> Vec<Vec<BigInt>> {
    form.adjugate_form().gram_rows().to_vec()
}

/// w^T A w = A over the integers, where A is the adjugate Gram matrix.
fn preserves(w: &IMatrix, adj: &[Vec<BigInt>]) -> bool {
    let n = w.len();
    for i in 0..n {
        for j in 0..n {
            let mut acc = BigInt::zero();
            for k in 0..n {
                for l in 0..n {
                    acc += BigInt::from(w[k][i]) * &adj[k][l] * BigInt::from(w[l][j]);
                }
            }
            if acc != adj[i][j] {
                return false;
            }
        }
    }
    true
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use num::ToPrimitive;
        RawGroupSpec {
            rank: self.rank,
            positive_roots: self
                .positive_roots
                .iter()
                .map(|r| {
                    r.coords
                        .iter()
                        .map(|c| c.to_integer().to_i64().expect("roots fit in i64"))
                        .collect()
                })
                .collect(),
            weyl: self.weyl_elements.clone(),
            form: self.form.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawGroupSpec::deserialize(d)?;
        GroupSpec::new(
            raw.rank,
            raw.positive_roots
                .iter()
                .map(|r| RatVec::from_ints(r))
                .collect(),
            raw.weyl,
            raw.form,
        )
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RawGroupSpec {
    rank: usize,
    #[serde(default)]
    positive_roots: Vec<Vec<i64>>,
    weyl: Vec<IMatrix>,
    form: InnerProductForm,
}
