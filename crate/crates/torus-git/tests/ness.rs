mod common;

use common::{candidate_directions, random_point, random_spec, rng};
use num::Zero;
use rand::Rng;
use ratgeom::{RatVec, VPolyhedron};
use torus_git::{
    analyze, enumerate_strata, limit, varpi_rel, weight_polyhedron, Limit, StratumLabel, Verdict,
};

#[test]
fn pushing_along_the_optimal_direction_preserves_the_verdict() {
    let mut rng = rng(0xe550_0001);
    let mut unstable_seen = 0;
    for case in 0..200 {
        let rank = rng.gen_range(1..=2);
        let spec = random_spec(&mut rng, rank);
        let x = random_point(&mut rng, &spec);
        let Verdict::Unstable { msq, tau_x } = analyze(&spec, &x).unwrap() else {
            continue;
        };
        unstable_seen += 1;
        let pushed = match limit(&spec, &x, &tau_x).unwrap() {
            Limit::Exists(y) => y,
            Limit::DoesNotExist => panic!("case {case}: limit along the optimum must exist"),
        };
        assert_eq!(
            analyze(&spec, &pushed).unwrap(),
            Verdict::Unstable { msq, tau_x },
            "case {case}: push changed the verdict"
        );
    }
    assert!(unstable_seen >= 30, "only {unstable_seen} unstable draws");
}

#[test]
fn destabilizer_of_the_pushed_point_destabilizes_the_original() {
    let mut rng = rng(0xe550_0002);
    let mut converses = 0;
    for _ in 0..200 {
        let rank = rng.gen_range(1..=2);
        let spec = random_spec(&mut rng, rank);
        let x = random_point(&mut rng, &spec);
        for tau in candidate_directions(&spec, &x) {
            if !varpi_rel(&spec, &x, &tau).unwrap().value.is_positive() {
                continue;
            }
            let Limit::Exists(pushed) = limit(&spec, &x, &tau).unwrap() else {
                continue;
            };
            let Verdict::Unstable { msq, tau_x } = analyze(&spec, &pushed).unwrap() else {
                continue;
            };
            if tau_x != tau {
                continue;
            }
            converses += 1;
            assert_eq!(
                analyze(&spec, &x).unwrap(),
                Verdict::Unstable { msq, tau_x },
                "optimality must transfer back from the pushed point"
            );
        }
    }
    assert!(converses >= 30, "only {converses} converse cases exercised");
}

#[test]
fn pushed_polyhedron_is_the_minimizing_face() {
    let mut rng = rng(0xe550_0003);
    let mut unstable_seen = 0;
    for case in 0..200 {
        let rank = rng.gen_range(1..=2);
        let spec = random_spec(&mut rng, rank);
        let x = random_point(&mut rng, &spec);
        let Verdict::Unstable { msq, tau_x } = analyze(&spec, &x).unwrap() else {
            continue;
        };
        unstable_seen += 1;
        let p = weight_polyhedron(&spec, &x).unwrap();
        // The nearest point p* of the polyhedron satisfies <y, p*> >= msq
        // for generator points and <r, p*> >= 0 for rays, in the inverse
        // form pairing; the minimizing face is where equality holds.
        let p_star = spec.form().flat(&tau_x.direction).neg();
        let form = spec.form();
        let face_points: Vec<RatVec> = p
            .points()
            .iter()
            .filter(|y| form.dual_pair(y, &p_star) == msq)
            .cloned()
            .collect();
        let face_rays: Vec<RatVec> = p
            .rays()
            .iter()
            .filter(|r| form.dual_pair(r, &p_star).is_zero())
            .cloned()
            .collect();
        let face = VPolyhedron::new(rank, face_points, face_rays).unwrap();
        let Limit::Exists(pushed) = limit(&spec, &x, &tau_x).unwrap() else {
            panic!("case {case}: limit along the optimum must exist");
        };
        let pushed_p = weight_polyhedron(&spec, &pushed).unwrap();
        assert!(
            pushed_p.set_equal(&face),
            "case {case}: pushed polyhedron {pushed_p:?} is not the face {face:?}"
        );
    }
    assert!(unstable_seen >= 30, "only {unstable_seen} unstable draws");
}

#[test]
fn growing_the_e_support_never_increases_the_invariant() {
    let mut rng = rng(0xe550_0004);
    let mut checked = 0;
    for _ in 0..60 {
        let rank = rng.gen_range(1..=2);
        let spec = random_spec(&mut rng, rank);
        let strata = enumerate_strata(&spec).unwrap();
        let all_e: Vec<RatVec> = spec
            .weights_e()
            .iter()
            .map(|e| e.weight.clone())
            .collect();
        for stratum in &strata {
            let StratumLabel::Unstable(_) = &stratum.label else {
                continue;
            };
            let msq = &stratum.msq;
            let witness = &stratum.witness;
            // Turning on one more E-weight grows the polyhedron, so the
            // distance to the origin cannot grow.
            for extra in all_e.iter().filter(|w| !witness.e_weights.contains(w)) {
                let mut e_weights = witness.e_weights.clone();
                e_weights.push(extra.clone());
                // None means semistable after growing: msq dropped to zero.
                if let Some(bigger_msq) = analyze_pattern(&spec, &e_weights, &witness.v_weights) {
                    assert!(
                        bigger_msq <= *msq,
                        "adding {extra:?} raised msq from {msq} to {bigger_msq}"
                    );
                }
                checked += 1;
            }
            // Turning one off shrinks it, so a still-unstable pattern
            // cannot fall below the original invariant.
            if witness.e_weights.len() >= 2 {
                for drop in 0..witness.e_weights.len() {
                    let e_weights: Vec<RatVec> = witness
                        .e_weights
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != drop)
                        .map(|(_, w)| w.clone())
                        .collect();
                    if let Some(smaller_msq) = analyze_pattern(&spec, &e_weights, &witness.v_weights)
                    {
                        assert!(
                            smaller_msq >= *msq,
                            "dropping a weight lowered msq from {msq} to {smaller_msq}"
                        );
                    }
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 100, "only {checked} pattern edits exercised");
}

/// Msq of the point supported exactly on the given weights, or None when
/// that point is semistable or V-stable.
fn analyze_pattern(
    spec: &torus_git::RepSpec,
    e_weights: &[RatVec],
    v_weights: &[RatVec],
) -> Option<ratgeom::Rational> {
    let e_entries: Vec<usize> = (0..spec.weights_e().len())
        .filter(|&i| e_weights.contains(&spec.weights_e()[i].weight))
        .collect();
    let v_entries: Vec<usize> = (0..spec.weights_v().len())
        .filter(|&i| v_weights.contains(&spec.weights_v()[i].weight))
        .collect();
    let x = torus_git::TorusPoint::from_entries(spec, &v_entries, &e_entries);
    match analyze(spec, &x).unwrap() {
        Verdict::Unstable { msq, .. } => Some(msq),
        Verdict::Semistable | Verdict::VStable => None,
    }
}

#[test]
fn enumerated_strata_cover_observed_labels() {
    let mut rng = rng(0xe550_0005);
    for _ in 0..60 {
        let rank = rng.gen_range(1..=2);
        let spec = random_spec(&mut rng, rank);
        let strata = enumerate_strata(&spec).unwrap();
        for _ in 0..10 {
            let x = random_point(&mut rng, &spec);
            let label = torus_git::stratum_label(&spec, &x).unwrap();
            assert!(
                strata.iter().any(|s| s.label == label),
                "observed label {label:?} missing from enumeration"
            );
        }
    }
}

#[test]
fn witness_patterns_satisfy_their_own_labels() {
    let mut rng = rng(0xe550_0006);
    for _ in 0..60 {
        let rank = rng.gen_range(1..=2);
        let spec = random_spec(&mut rng, rank);
        for stratum in enumerate_strata(&spec).unwrap() {
            let pattern_msq = analyze_pattern(
                &spec,
                &stratum.witness.e_weights,
                &stratum.witness.v_weights,
            );
            match &stratum.label {
                StratumLabel::Semistable => assert_eq!(pattern_msq, None),
                StratumLabel::Unstable(_) => assert_eq!(pattern_msq, Some(stratum.msq.clone())),
            }
        }
    }
}
