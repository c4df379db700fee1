use num::{BigRational, Zero};

use ratgeom::{min_norm_point, RatVec, Rational, VPolyhedron};

use crate::analyze::StratumLabel;
use crate::rep::{OneParamSubgroupQ, RepSpec};
use crate::{Result, TorusGitError};

/// Subset enumeration over support pairs is exponential in the number of
/// weight entries; this cap keeps it at 2^12 polyhedra.
pub const MAX_STRATA_WEIGHTS: usize = 12;

/// A support pair realizing a stratum: the distinct weights carrying
/// nonzero coefficients. Any point with exactly these supports lands in
/// the stratum of the enclosing label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPattern {
    pub e_weights: Vec<RatVec>,
    pub v_weights: Vec<RatVec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stratum {
    pub label: StratumLabel,
    /// Squared Mumford invariant of the stratum; zero on the open
    /// semistable stratum.
    pub msq: Rational,
    pub witness: SupportPattern,
}

/// All stratum labels realized by points of V x P(E), each with one
/// witness support pattern. Labels are deduplicated by exact direction
/// equality; the semistable stratum is listed first, unstable strata in
/// increasing (msq, direction) order.
pub fn enumerate_strata(spec: &RepSpec) -> Result<Vec<Stratum>> {
    let n_raw = spec.weights_e().len() + spec.weights_v().len();
    if n_raw > MAX_STRATA_WEIGHTS {
        return Err(TorusGitError::TooManyWeights {
            got: n_raw,
            cap: MAX_STRATA_WEIGHTS,
        });
    }
    let e_weights = distinct(spec.weights_e().iter().map(|e| &e.weight));
    let v_weights = distinct(spec.weights_v().iter().map(|e| &e.weight));

    let adj = spec.form().adjugate_form();
    let det = BigRational::from_integer(spec.form().det().clone());

    let mut semistable: Option<SupportPattern> = None;
    let mut unstable: Vec<(OneParamSubgroupQ, Rational, SupportPattern)> = Vec::new();

    for e_mask in 1u32..(1 << e_weights.len()) {
        for v_mask in 0u32..(1 << v_weights.len()) {
            let pattern = SupportPattern {
                e_weights: picked(&e_weights, e_mask),
                v_weights: picked(&v_weights, v_mask),
            };
            let rays: Vec<RatVec> = pattern
                .v_weights
                .iter()
                .filter(|w| !w.is_zero())
                .cloned()
                .collect();
            let p = VPolyhedron::new(spec.rank(), pattern.e_weights.clone(), rays)?;
            if p.contains_origin() {
                if semistable.is_none() {
                    semistable = Some(pattern);
                }
                continue;
            }
            let mn = min_norm_point(&p, &adj)?;
            let tau = OneParamSubgroupQ::new(spec.form().sharp(&mn.argmin).neg());
            if unstable.iter().any(|(t, _, _)| *t == tau) {
                continue;
            }
            let msq = mn.sqdist / &det;
            unstable.push((tau, msq, pattern));
        }
    }

    unstable.sort_by(|(ta, ma, _), (tb, mb, _)| {
        ma.cmp(mb).then_with(|| ta.direction.coords.cmp(&tb.direction.coords))
    });

    let mut out = Vec::new();
    if let Some(witness) = semistable {
        out.push(Stratum {
            label: StratumLabel::Semistable,
            msq: Rational::zero(),
            witness,
        });
    }
    out.extend(unstable.into_iter().map(|(tau, msq, witness)| Stratum {
        label: StratumLabel::Unstable(tau),
        msq,
        witness,
    }));
    Ok(out)
}

fn distinct<'a>(weights: impl Iterator<Item = &'a RatVec>) -> Vec<RatVec> {
    let mut out: Vec<RatVec> = Vec::new();
    for w in weights {
        if !out.contains(w) {
            out.push(w.clone());
        }
    }
    out
}

fn picked(weights: &[RatVec], mask: u32) -> Vec<RatVec> {
    (0..weights.len())
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| weights[i].clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ratgeom::rat_int;

    #[test]
    fn opposite_weights_give_three_strata() {
        let spec = RepSpec::simple(1, &[&[1], &[-1]], &[]).unwrap();
        let strata = enumerate_strata(&spec).unwrap();
        let labels: Vec<&StratumLabel> = strata.iter().map(|s| &s.label).collect();
        assert_eq!(
            labels,
            vec![
                &StratumLabel::Semistable,
                &StratumLabel::Unstable(OneParamSubgroupQ::from_ints(&[-1])),
                &StratumLabel::Unstable(OneParamSubgroupQ::from_ints(&[1])),
            ]
        );
    }

    #[test]
    fn single_weight_gives_single_stratum() {
        let spec = RepSpec::simple(1, &[&[1]], &[]).unwrap();
        let strata = enumerate_strata(&spec).unwrap();
        assert_eq!(strata.len(), 1);
        assert_eq!(
            strata[0].label,
            StratumLabel::Unstable(OneParamSubgroupQ::from_ints(&[-1]))
        );
        assert_eq!(strata[0].msq, rat_int(1));
    }

    #[test]
    fn doubled_weight_scales_the_invariant() {
        let spec = RepSpec::simple(1, &[&[2]], &[]).unwrap();
        let strata = enumerate_strata(&spec).unwrap();
        assert_eq!(strata.len(), 1);
        assert_eq!(
            strata[0].label,
            StratumLabel::Unstable(OneParamSubgroupQ::from_ints(&[-2]))
        );
        assert_eq!(strata[0].msq, rat_int(4));
    }

    #[test]
    fn size_cap_is_enforced() {
        let weights: Vec<Vec<i64>> = (0..13).map(|i| vec![i]).collect();
        let refs: Vec<&[i64]> = weights.iter().map(|w| w.as_slice()).collect();
        let spec = RepSpec::simple(1, &refs, &[]).unwrap();
        assert!(matches!(
            enumerate_strata(&spec),
            Err(TorusGitError::TooManyWeights { got: 13, cap: 12 })
        ));
    }

    #[test]
    fn duplicate_weight_entries_do_not_duplicate_strata() {
        let spec = RepSpec::simple(1, &[&[1], &[1]], &[]).unwrap();
        let strata = enumerate_strata(&spec).unwrap();
        assert_eq!(strata.len(), 1);
    }
}
