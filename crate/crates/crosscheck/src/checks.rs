//! The consistency suites: each one runs an instance family through
//! two independent computation paths and reports disagreements.
//!
//! Instances run concurrently; the report is assembled in index order,
//! so a run is reproducible bit for bit from the family seed. Every
//! failing instance is emitted with a payload that re-runs standalone.

use std::collections::BTreeSet;

use num::complex::Complex64;
use num::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use group_git::{
    find_highest_slot, moment_polyhedron_Bx, shift_point, shift_rep, GroupSpec, Sl2Rep,
    UnipotentSampler,
};
use kahler_flow::{
    flow, moment, semistable_flow, su2_block_rep, torus_rep, CartanSpec, FlowOpts, HermitianRep,
    KahlerError, StatePoint,
};
use ratgeom::{RatVec, Rational, VPolyhedron};
use torus_git::{
    analyze, enumerate_strata, limit, moment_polyhedron_T, Limit, RepSpec, StratumLabel,
    TorusPoint, Verdict,
};

use crate::bridge::{
    direction_in_basis, e_slot_rates, occupation_count, shifted_sl2_flow, skew_spectrum, sl2_state,
    torus_state,
};
use crate::family::{mix, rational_f64, InstanceFamily, Sl2Instance};
use crate::report::{CheckFailure, CheckReport, InstancePayload};
use crate::{Result, TOL_EXACT, TOL_FLOW_INTERNAL, TOL_FLOW_VS_EXACT};

/// Moment-norm plateau above which a flow that ran out of time still
/// classifies as unstable: the norm decreases monotonically along the
/// flow, so a plateau far above the semistable threshold cannot belong
/// to a semistable point at safe margin from the boundary.
const PLATEAU_UNSTABLE: f64 = 1e-2;

/// Size cap for shifted flow problems, in projective dimensions.
const SHIFT_DIM_CAP: usize = 700;

/// Generator cap of the exact minimum-norm layer; shifted exact probes
/// stay under it by bounding the multiset count of live slots.
const EXACT_SUPPORT_CAP: usize = 16;

struct Probe {
    deviation: f64,
    failure: Option<(String, Option<InstancePayload>)>,
}

impl Probe {
    fn pass(deviation: f64) -> Self {
        Probe {
            deviation,
            failure: None,
        }
    }

    fn fail(deviation: f64, detail: String, payload: Option<InstancePayload>) -> Self {
        Probe {
            deviation,
            failure: Some((detail, payload)),
        }
    }
}

fn assemble(check: &str, family: &InstanceFamily, tolerance: f64, probes: Vec<Probe>) -> CheckReport {
    let instances_run = probes.len();
    let max_deviation = probes.iter().map(|p| p.deviation).fold(0.0, f64::max);
    let failures = probes
        .into_iter()
        .enumerate()
        .filter_map(|(i, p)| {
            p.failure
                .map(|(detail, payload)| CheckFailure::new(i, detail, payload))
        })
        .collect();
    CheckReport::new(
        check,
        family.seed,
        instances_run,
        tolerance,
        max_deviation,
        failures,
    )
}

fn run_indexed<F>(count: usize, body: F) -> Vec<Probe>
where
    F: Fn(usize) -> Probe + Sync,
{
    (0..count).into_par_iter().map(body).collect()
}

/// Guard for per-instance bodies: a layer error surfaces as a failure
/// with the instance payload attached, not as a panic.
fn guarded<F>(payload: Option<InstancePayload>, body: F) -> Probe
where
    F: FnOnce() -> Result<Probe>,
{
    match body() {
        Ok(p) => p,
        Err(e) => Probe::fail(f64::INFINITY, e.to_string(), payload),
    }
}

fn flow_opts() -> FlowOpts {
    FlowOpts::default()
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite spectra"));
    v
}

fn support_sets(
    spec: &RepSpec,
    x: &TorusPoint,
) -> (BTreeSet<Vec<Rational>>, BTreeSet<Vec<Rational>>) {
    let take = |ws: Vec<RatVec>| ws.into_iter().map(|w| w.coords).collect();
    (take(spec.e_support(x)), take(spec.v_support(x)))
}

/// Smallest positive integer clearing the denominators, when it is at
/// most `cap`.
fn denom_lcm_capped(v: &RatVec, cap: u32) -> Option<u32> {
    let mut ell = num::BigInt::one();
    for c in &v.coords {
        ell = num::integer::lcm(ell, c.denom().clone());
    }
    ell.to_u32().filter(|l| *l <= cap)
}

/// Bounds of a polyhedron on a rank-1 chamber: the finite lower end and
/// the upper end when bounded. None when empty.
fn rank1_interval(p: &VPolyhedron) -> Option<(Rational, Option<Rational>)> {
    if p.is_empty() {
        return None;
    }
    let coords: Vec<Rational> = p.points().iter().map(|q| q.coords[0].clone()).collect();
    let lo = coords.iter().min().expect("nonempty polyhedron has points").clone();
    let hi = if p.rays().is_empty() {
        Some(coords.into_iter().max().expect("nonempty"))
    } else {
        None
    };
    Some((lo, hi))
}

fn rank1_point(r: &Rational) -> RatVec {
    RatVec {
        coords: vec![r.clone()],
    }
}

/// Flow classification with the plateau rule for runs that hit the
/// time horizon: see PLATEAU_UNSTABLE.
fn classify_flow(
    rep: &HermitianRep,
    state: &StatePoint,
    cartan: &CartanSpec,
) -> Result<(bool, f64)> {
    match flow(rep, state, cartan, &flow_opts()) {
        Ok(res) => Ok((semistable_flow(&res), res.m_estimate)),
        Err(KahlerError::NonConverged { partial, .. }) if partial.m_estimate > PLATEAU_UNSTABLE => {
            Ok((false, partial.m_estimate))
        }
        Err(e) => Err(e.into()),
    }
}

/// Exact semistability of the torus problem shifted by a rational
/// character, or None when the probe would exceed the exact layer's
/// generator cap.
fn torus_shifted_semistable(
    spec: &RepSpec,
    x: &TorusPoint,
    lambda: &RatVec,
) -> Result<Option<bool>> {
    let live = spec.e_support(x).len();
    let Some(ell) = denom_lcm_capped(lambda, 6) else {
        return Ok(None);
    };
    if occupation_count(live, ell as usize) > EXACT_SUPPORT_CAP {
        return Ok(None);
    }
    let g = GroupSpec::torus(spec.form().clone());
    let lam_ell = lambda.scale(&Rational::from_integer(ell.into()));
    let irrep = vec![lam_ell];
    let slot = find_highest_slot(&irrep, ell, lambda)?;
    let shifted_spec = shift_rep(spec, &g, ell, lambda, &irrep)?;
    let shifted_x = shift_point(spec, x, ell, irrep.len(), slot)?;
    Ok(Some(!analyze(&shifted_spec, &shifted_x)?.is_unstable()))
}

/// Flow semistability of the shifted block problem at a dominant
/// rational, or None when the shifted dimension exceeds the cap.
fn sl2_shifted_semistable(inst: &Sl2Instance, lambda: &Rational) -> Result<Option<(bool, f64)>> {
    debug_assert!(!lambda.is_negative());
    let ell = lambda.denom().to_usize().expect("desk-scale denominator");
    let h = lambda.numer().to_usize().expect("dominant numerator");
    let dim_e = inst.rep.dim_e();
    if occupation_count(dim_e, ell) * (h + 1) > SHIFT_DIM_CAP {
        return Ok(None);
    }
    let (rep, state) = shifted_sl2_flow(inst, ell, h)?;
    let (ss, m) = classify_flow(&rep, &state, &CartanSpec::su2())?;
    Ok(Some((ss, m)))
}

fn sl2_payload(inst: &Sl2Instance) -> Option<InstancePayload> {
    inst.spec().ok().map(|spec| {
        InstancePayload::sl2(&spec, &inst.rep.e_blocks, &inst.rep.v_blocks, &inst.point)
    })
}

/// Mumford invariant agreement between the exact layer and the flow
/// layer, with identical semistability verdicts.
pub fn check_m_equality(family: &InstanceFamily) -> CheckReport {
    let probes = run_indexed(family.count, |index| {
        let drawn = match crafted_m_instance(index) {
            Some(inst) => Ok(inst),
            None => family.torus_flow_instance(index),
        };
        let (spec, x) = match drawn {
            Ok(p) => p,
            Err(e) => return Probe::fail(f64::INFINITY, e.to_string(), None),
        };
        let payload = Some(InstancePayload::torus(&spec, &x));
        guarded(payload.clone(), || {
            let verdict = analyze(&spec, &x)?;
            let m_exact = match &verdict {
                Verdict::Unstable { msq, .. } => rational_f64(msq).sqrt(),
                _ => 0.0,
            };
            let (rep, _) = torus_rep(&spec)?;
            let res = flow(&rep, &torus_state(&x)?, &CartanSpec::torus(), &flow_opts())?;
            let dev = (res.m_estimate - m_exact).abs();
            let ss_exact = !verdict.is_unstable();
            let ss_flow = semistable_flow(&res);
            if ss_exact != ss_flow {
                return Ok(Probe::fail(
                    dev,
                    format!(
                        "verdicts disagree: exact semistable {ss_exact}, flow semistable {ss_flow} (m_estimate {:.3e})",
                        res.m_estimate
                    ),
                    payload.clone(),
                ));
            }
            if dev > TOL_FLOW_VS_EXACT {
                return Ok(Probe::fail(
                    dev,
                    format!(
                        "Mumford invariants disagree: exact {m_exact}, flow {} (deviation {dev:.3e})",
                        res.m_estimate
                    ),
                    payload.clone(),
                ));
            }
            Ok(Probe::pass(dev))
        })
    });
    assemble("m-equality", family, TOL_FLOW_VS_EXACT, probes)
}

/// Two pinned instances keep the suite anchored to hand-checked data:
/// a semistable weight pair and the single positive weight with
/// invariant exactly 1.
fn crafted_m_instance(index: usize) -> Option<(RepSpec, TorusPoint)> {
    match index {
        0 => {
            let spec = RepSpec::simple(1, &[&[1], &[-1]], &[]).expect("valid crafted spec");
            let x = TorusPoint::new(
                vec![],
                vec![Complex64::new(1.0, 0.3), Complex64::new(-0.7, 0.4)],
            );
            Some((spec, x))
        }
        1 => {
            let spec = RepSpec::simple(1, &[&[1]], &[]).expect("valid crafted spec");
            let x = TorusPoint::new(vec![], vec![Complex64::new(1.0, 0.0)]);
            Some((spec, x))
        }
        _ => None,
    }
}

/// Pushing an unstable point to its limit along the optimal direction
/// preserves the optimal data exactly, and the push is idempotent.
pub fn check_ness(family: &InstanceFamily) -> CheckReport {
    let probes = run_indexed(family.count, |index| {
        let (spec, x) = match family.torus_instance(index) {
            Ok(p) => p,
            Err(e) => return Probe::fail(f64::INFINITY, e.to_string(), None),
        };
        let payload = Some(InstancePayload::torus(&spec, &x));
        guarded(payload.clone(), || {
            let Verdict::Unstable { msq, tau_x } = analyze(&spec, &x)? else {
                return Ok(Probe::pass(0.0));
            };
            let Limit::Exists(x0) = limit(&spec, &x, &tau_x)? else {
                return Ok(Probe::fail(
                    f64::INFINITY,
                    "limit along the optimal direction does not exist".to_string(),
                    payload.clone(),
                ));
            };
            match analyze(&spec, &x0)? {
                Verdict::Unstable {
                    msq: msq0,
                    tau_x: tau0,
                } if msq0 == msq && tau0 == tau_x => {}
                other => {
                    return Ok(Probe::fail(
                        f64::INFINITY,
                        format!("optimal data not preserved by the limit push: {other:?}"),
                        payload.clone(),
                    ));
                }
            }
            let Limit::Exists(x1) = limit(&spec, &x0, &tau_x)? else {
                return Ok(Probe::fail(
                    f64::INFINITY,
                    "push of a fixed point lost its limit".to_string(),
                    payload.clone(),
                ));
            };
            if support_sets(&spec, &x1) != support_sets(&spec, &x0) {
                return Ok(Probe::fail(
                    f64::INFINITY,
                    "limit push is not idempotent on supports".to_string(),
                    payload.clone(),
                ));
            }
            Ok(Probe::pass(0.0))
        })
    });
    assemble("ness", family, TOL_EXACT, probes)
}

/// Converse reconstruction: any direction that is optimal for its own
/// limit point must be the optimal direction of the start, with the
/// same invariant.
pub fn check_ness_converse(family: &InstanceFamily) -> CheckReport {
    let probes = run_indexed(family.count, |index| {
        let (spec, x) = match family.torus_instance(index) {
            Ok(p) => p,
            Err(e) => return Probe::fail(f64::INFINITY, e.to_string(), None),
        };
        let payload = Some(InstancePayload::torus(&spec, &x));
        guarded(payload.clone(), || {
            let Verdict::Unstable { msq, tau_x } = analyze(&spec, &x)? else {
                return Ok(Probe::pass(0.0));
            };
            for stratum in enumerate_strata(&spec)? {
                let StratumLabel::Unstable(sigma) = stratum.label else {
                    continue;
                };
                let Limit::Exists(y) = limit(&spec, &x, &sigma)? else {
                    continue;
                };
                let Verdict::Unstable {
                    msq: msq_y,
                    tau_x: tau_y,
                } = analyze(&spec, &y)?
                else {
                    continue;
                };
                if tau_y == sigma && (sigma != tau_x || msq_y != msq) {
                    return Ok(Probe::fail(
                        f64::INFINITY,
                        format!(
                            "direction {:?} is optimal for its own limit but not for the start",
                            sigma.direction.strings()
                        ),
                        payload.clone(),
                    ));
                }
            }
            Ok(Probe::pass(0.0))
        })
    });
    assemble("ness-converse", family, TOL_EXACT, probes)
}

/// The moment value at the flow limit is conjugate to the exact
/// optimal direction: componentwise in the torus case, and through
/// sorted induced spectra in general, with the asymptotic direction's
/// norm matching the moment norm.
pub fn check_lambda_conjugacy(family: &InstanceFamily) -> CheckReport {
    let sl2_count = (family.count / 5).max(1);
    let mut probes = run_indexed(family.count, |index| {
        let drawn = if index == 0 {
            let spec = RepSpec::simple(1, &[&[1]], &[]).expect("valid crafted spec");
            Ok((spec, TorusPoint::new(vec![], vec![Complex64::new(1.0, 0.0)])))
        } else {
            family.torus_unstable_instance(index)
        };
        let (spec, x) = match drawn {
            Ok(p) => p,
            Err(e) => return Probe::fail(f64::INFINITY, e.to_string(), None),
        };
        let payload = Some(InstancePayload::torus(&spec, &x));
        guarded(payload.clone(), || {
            let Verdict::Unstable { tau_x, .. } = analyze(&spec, &x)? else {
                return Ok(Probe::fail(
                    f64::INFINITY,
                    "conjugacy family produced a semistable instance".to_string(),
                    payload.clone(),
                ));
            };
            let (rep, basis) = torus_rep(&spec)?;
            let res = flow(&rep, &torus_state(&x)?, &CartanSpec::torus(), &flow_opts())?;
            let expected = direction_in_basis(spec.form(), &basis, &tau_x.direction);
            let dev_coords = max_abs_diff(&res.phi_inf, &expected);
            let got = skew_spectrum(&rep.combine_e(&res.phi_inf));
            let want = sorted(e_slot_rates(&spec, &tau_x.direction));
            let dev_spec = max_abs_diff(&got, &want);
            let dev_norm = (l2(&res.xi_inf) - l2(&res.phi_inf)).abs();
            let dev = dev_coords.max(dev_spec).max(dev_norm);
            if dev > TOL_FLOW_VS_EXACT {
                return Ok(Probe::fail(
                    dev,
                    format!(
                        "conjugacy deviation {dev:.3e} (coords {dev_coords:.3e}, spectra {dev_spec:.3e}, norms {dev_norm:.3e})"
                    ),
                    payload.clone(),
                ));
            }
            Ok(Probe::pass(dev))
        })
    });
    let sl2_probes = run_indexed(sl2_count, |j| {
        let drawn = if j == 0 {
            Ok(Sl2Instance {
                rep: Sl2Rep::new(vec![2], vec![]),
                point: TorusPoint::new(
                    vec![],
                    vec![
                        Complex64::new(1.0, 0.0),
                        Complex64::new(0.0, 0.0),
                        Complex64::new(0.0, 0.0),
                    ],
                ),
            })
        } else {
            family.sl2_unstable_instance(usize::MAX - j)
        };
        let inst = match drawn {
            Ok(i) => i,
            Err(e) => return Probe::fail(f64::INFINITY, e.to_string(), None),
        };
        let payload = sl2_payload(&inst);
        guarded(payload.clone(), || {
            let spec = inst.spec()?;
            let Verdict::Unstable { msq, tau_x } = analyze(&spec, &inst.point)? else {
                return Ok(Probe::fail(
                    f64::INFINITY,
                    "conjugacy family produced a semistable block instance".to_string(),
                    payload.clone(),
                ));
            };
            let rep = su2_block_rep(&inst.rep.e_blocks, &inst.rep.v_blocks)?;
            let res = flow(
                &rep,
                &sl2_state(&inst.rep, &inst.point)?,
                &CartanSpec::su2(),
                &flow_opts(),
            )?;
            let got = skew_spectrum(&rep.combine_e(&res.phi_inf));
            let want = sorted(e_slot_rates(&spec, &tau_x.direction));
            let dev_spec = max_abs_diff(&got, &want);
            let dev_m = (l2(&res.phi_inf) - rational_f64(&msq).sqrt()).abs();
            let dev_norm = (l2(&res.xi_inf) - l2(&res.phi_inf)).abs();
            let dev = dev_spec.max(dev_m).max(dev_norm);
            if dev > TOL_FLOW_VS_EXACT {
                return Ok(Probe::fail(
                    dev,
                    format!(
                        "block conjugacy deviation {dev:.3e} (spectra {dev_spec:.3e}, invariant {dev_m:.3e}, norms {dev_norm:.3e})"
                    ),
                    payload.clone(),
                ));
            }
            Ok(Probe::pass(dev))
        })
    });
    probes.extend(sl2_probes);
    assemble("lambda-conjugacy", family, TOL_FLOW_VS_EXACT, probes)
}

/// The shifting equivalence: a dominant rational character lies in the
/// moment polyhedron exactly when the shifted problem is semistable.
/// Exact on torus instances; by flow on block instances.
pub fn check_shifting(family: &InstanceFamily) -> CheckReport {
    let sl2_count = (family.count / 4).max(1);
    let mut probes = run_indexed(family.count, |index| {
        let (spec, x) = match family.torus_instance(index) {
            Ok(p) => p,
            Err(e) => return Probe::fail(f64::INFINITY, e.to_string(), None),
        };
        let payload = Some(InstancePayload::torus(&spec, &x));
        guarded(payload.clone(), || {
            let delta = moment_polyhedron_T(&spec, &x)?;
            let mut candidates: Vec<RatVec> = Vec::new();
            candidates.push(RatVec::zero(spec.rank()));
            for p in delta.points() {
                candidates.push(p.clone());
            }
            if let Some(centroid) = centroid(delta.points()) {
                candidates.push(centroid);
            }
            if let (Some(p), Some(r)) = (delta.points().first(), delta.rays().first()) {
                candidates.push(p.add(r));
            }
            let mut outside = RatVec::zero(spec.rank());
            outside.coords[0] = Rational::from_integer((family.weight_bound + 2).into());
            candidates.push(outside);
            let mut tested = 0usize;
            for lambda in candidates {
                let Some(ss) = torus_shifted_semistable(&spec, &x, &lambda)? else {
                    continue;
                };
                tested += 1;
                let expected = delta.contains(&lambda);
                if ss != expected {
                    return Ok(Probe::fail(
                        f64::INFINITY,
                        format!(
                            "shifted verdict at {:?} is semistable={ss}, membership={expected}",
                            lambda.strings()
                        ),
                        payload.clone(),
                    ));
                }
            }
            if tested == 0 {
                return Ok(Probe::fail(
                    f64::INFINITY,
                    "no shifting probe fit under the exact-layer caps".to_string(),
                    payload.clone(),
                ));
            }
            Ok(Probe::pass(0.0))
        })
    });
    let sl2_probes = run_indexed(sl2_count, |j| {
        let inst = match family.sl2_instance(usize::MAX / 2 - j) {
            Ok(i) => i,
            Err(e) => return Probe::fail(f64::INFINITY, e.to_string(), None),
        };
        let payload = sl2_payload(&inst);
        guarded(payload.clone(), || {
            let spec = inst.spec()?;
            let sampler = UnipotentSampler::standard(1, mix(family.seed, 7_000_000 + j as u64));
            let delta = moment_polyhedron_Bx(
                &spec,
                &inst.point,
                &GroupSpec::sl2(),
                &sampler,
                |s, y| inst.rep.act(s[0], y),
                16,
            )?;
            let mut dev = 0.0f64;
            for (lambda, expected) in rank1_probes(&delta.polyhedron) {
                let Some((ss, m)) = sl2_shifted_semistable(&inst, &lambda)? else {
                    continue;
                };
                if ss != expected {
                    return Ok(Probe::fail(
                        f64::INFINITY,
                        format!(
                            "shifted flow at {lambda} is semistable={ss}, membership={expected}"
                        ),
                        payload.clone(),
                    ));
                }
                if expected {
                    dev = dev.max(m);
                }
            }
            Ok(Probe::pass(dev))
        })
    });
    probes.extend(sl2_probes);
    assemble("shifting", family, TOL_FLOW_INTERNAL, probes)
}

fn centroid(points: &[RatVec]) -> Option<RatVec> {
    let first = points.first()?;
    let n = Rational::from_integer((points.len() as i64).into());
    let mut acc = RatVec::zero(first.dim());
    for p in points {
        acc = acc.add(p);
    }
    Some(acc.scale(&n.recip()))
}

/// Structured rank-1 probe set: interior and exterior rationals at safe
/// margin from the interval ends, each tagged with exact membership.
fn rank1_probes(poly: &VPolyhedron) -> Vec<(Rational, bool)> {
    let margin = Rational::new(1.into(), 100.into());
    let mut out: Vec<(Rational, bool)> = Vec::new();
    let mut push = |lam: Rational| {
        if lam.is_negative() || lam.denom() > &num::BigInt::from(4) {
            return;
        }
        let inside = poly.contains(&rank1_point(&lam));
        out.push((lam, inside));
    };
    match rank1_interval(poly) {
        None => {
            for k in 0..3i64 {
                push(Rational::from_integer(k.into()));
            }
        }
        Some((lo, hi)) => {
            let half = Rational::new(1.into(), 2.into());
            match &hi {
                Some(hi) => {
                    let width = hi - &lo;
                    for num in [1i64, 2, 3] {
                        let t = Rational::new(num.into(), 4.into());
                        let lam = &lo + &(&width * &t);
                        if &lam - &lo >= margin && hi - &lam >= margin {
                            push(lam);
                        }
                    }
                    push(hi + &half);
                    push(hi + &Rational::from_integer(2.into()));
                }
                None => {
                    push(&lo + &half);
                    push(&lo + &Rational::from_integer(3.into()));
                }
            }
            if lo > margin {
                push(&lo - &half);
                push(Rational::zero());
                let lam = &lo * &half;
                if &lo - &lam >= margin {
                    push(lam);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Two-sided test of the Borel moment polyhedron: sampled orbit points
/// keep their dominant moment values inside it, and a rational grid at
/// safe margin classifies exactly as the shifted flows do.
pub fn check_borel_polytope(family: &InstanceFamily) -> CheckReport {
    let probes = run_indexed(family.count, |index| {
        let inst = match family.borel_instance(index) {
            Ok(i) => i,
            Err(e) => return Probe::fail(f64::INFINITY, e.to_string(), None),
        };
        let payload = sl2_payload(&inst);
        guarded(payload.clone(), || {
            let spec = inst.spec()?;
            let sampler = UnipotentSampler::standard(1, mix(family.seed, 9_000_000 + index as u64));
            let delta = moment_polyhedron_Bx(
                &spec,
                &inst.point,
                &GroupSpec::sl2(),
                &sampler,
                |s, y| inst.rep.act(s[0], y),
                16,
            )?;
            let mut dev = 0.0f64;
            // Containment side. Only supports that fill every slot make
            // the dominant sweep stay inside the Borel slice: dropping
            // slots can leave orbit sweeps whose dominant representative
            // is attained outside the closed Borel orbit.
            if index % 2 == 0 {
                let rep = su2_block_rep(&inst.rep.e_blocks, &inst.rep.v_blocks)?;
                let cartan = CartanSpec::su2();
                let mut rng = family.rng_for(5_000_000 + index);
                use rand::Rng;
                for _ in 0..30 {
                    let a: f64 = rng.gen_range(-1.2..1.2);
                    let s: f64 = rng.gen_range(-3.0..3.0);
                    let y = borel_move(&inst, a, s);
                    let state = sl2_state(&inst.rep, &y)?;
                    let phi = moment(&rep, &state)?;
                    let dom = cartan.dominant(&phi);
                    let slack = rank1_slack(&delta.polyhedron, dom[2]);
                    dev = dev.max(slack);
                    if slack > TOL_FLOW_VS_EXACT {
                        return Ok(Probe::fail(
                            slack,
                            format!(
                                "dominant moment value {:.6} leaves the polyhedron by {slack:.3e}",
                                dom[2]
                            ),
                            payload.clone(),
                        ));
                    }
                }
            }
            // Classification side, both directions.
            for (lambda, expected) in rank1_probes(&delta.polyhedron) {
                let Some((ss, m)) = sl2_shifted_semistable(&inst, &lambda)? else {
                    continue;
                };
                if ss != expected {
                    return Ok(Probe::fail(
                        f64::INFINITY,
                        format!(
                            "grid point {lambda} classifies as semistable={ss}, membership={expected}"
                        ),
                        payload.clone(),
                    ));
                }
                if expected {
                    dev = dev.max(m);
                }
            }
            Ok(Probe::pass(dev))
        })
    });
    assemble("borel-polytope", family, TOL_FLOW_VS_EXACT, probes)
}

/// A Borel move: the unipotent parameter first, then the torus scale
/// exp(a * weight) on every slot.
fn borel_move(inst: &Sl2Instance, a: f64, s: f64) -> TorusPoint {
    let moved = inst.rep.act(s, &inst.point);
    TorusPoint::new(
        torus_scale(&inst.rep.v_blocks, a, &moved.coeffs_v),
        torus_scale(&inst.rep.e_blocks, a, &moved.coeffs_e),
    )
}

fn torus_scale(blocks: &[usize], a: f64, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(coeffs.len());
    let mut base = 0;
    for &n in blocks {
        for k in 0..=n {
            let w = n as f64 - 2.0 * k as f64;
            out.push(coeffs[base + k] * (a * w).exp());
        }
        base += n + 1;
    }
    out
}

/// Distance from a value to a rank-1 polyhedron, zero inside.
fn rank1_slack(poly: &VPolyhedron, value: f64) -> f64 {
    match rank1_interval(poly) {
        None => f64::INFINITY,
        Some((lo, hi)) => {
            let lo = rational_f64(&lo);
            let below = lo - value;
            let above = match hi {
                Some(hi) => value - rational_f64(&hi),
                None => f64::NEG_INFINITY,
            };
            below.max(above).max(0.0)
        }
    }
}

/// Convexity of the certified region: midpoints of certified pairs
/// certify, and on torus instances the recession cone of the moment
/// polyhedron is exactly the cone of negated affine support weights.
pub fn check_convexity(family: &InstanceFamily) -> CheckReport {
    let probes = run_indexed(family.count, |index| {
        let pair_probe = convexity_pair(family, index);
        if pair_probe.failure.is_some() {
            return pair_probe;
        }
        let shape_probe = convexity_shape(family, index);
        Probe {
            deviation: pair_probe.deviation.max(shape_probe.deviation),
            failure: shape_probe.failure,
        }
    });
    assemble("convexity", family, TOL_FLOW_INTERNAL, probes)
}

/// One certified pair and its midpoint grid on a small block instance.
fn convexity_pair(family: &InstanceFamily, index: usize) -> Probe {
    for attempt in 0..6u64 {
        let inst = match family.convexity_instance(index, attempt) {
            Ok(i) => i,
            Err(e) => return Probe::fail(f64::INFINITY, e.to_string(), None),
        };
        let payload = sl2_payload(&inst);
        let outcome = guarded(payload.clone(), || {
            let spec = inst.spec()?;
            let sampler = UnipotentSampler::standard(
                1,
                mix(family.seed, 11_000_000 + (index as u64) * 8 + attempt),
            );
            let delta = moment_polyhedron_Bx(
                &spec,
                &inst.point,
                &GroupSpec::sl2(),
                &sampler,
                |s, y| inst.rep.act(s[0], y),
                16,
            )?;
            let Some((lo, hi)) = rank1_interval(&delta.polyhedron) else {
                return Ok(Probe::fail(0.0, "retry".to_string(), None));
            };
            let half = Rational::new(1.into(), 2.into());
            let mu0 = &lo + &half;
            let mu1 = match &hi {
                Some(hi) => hi - &half,
                None => &mu0 + &Rational::from_integer(3.into()),
            };
            if &mu1 - &mu0 < Rational::one() {
                return Ok(Probe::fail(0.0, "retry".to_string(), None));
            }
            let mut dev = 0.0f64;
            for mu in [&mu0, &mu1] {
                match sl2_shifted_semistable(&inst, mu)? {
                    Some((true, m)) => dev = dev.max(m),
                    Some((false, _)) | None => {
                        return Ok(Probe::fail(0.0, "retry".to_string(), None));
                    }
                }
            }
            for num in [1i64, 2, 3] {
                let t = Rational::new(num.into(), 4.into());
                let mid = &mu0 + &(&(&mu1 - &mu0) * &t);
                if mid.denom() > &num::BigInt::from(4) {
                    continue;
                }
                match sl2_shifted_semistable(&inst, &mid)? {
                    Some((true, m)) => dev = dev.max(m),
                    None => continue,
                    Some((false, m)) => {
                        return Ok(Probe::fail(
                            m,
                            format!(
                                "midpoint {mid} of certified pair ({mu0}, {mu1}) fails to certify"
                            ),
                            payload.clone(),
                        ));
                    }
                }
            }
            Ok(Probe::pass(dev))
        });
        match &outcome.failure {
            Some((detail, _)) if detail == "retry" => continue,
            _ => return outcome,
        }
    }
    Probe::fail(
        f64::INFINITY,
        "no certifiable pair found after resampling".to_string(),
        None,
    )
}

/// Recession-cone shape and exact midpoint consistency on a torus
/// instance, with a pinned purely affine instance first: its moment
/// polyhedron is a cone with vertex at the origin.
fn convexity_shape(family: &InstanceFamily, index: usize) -> Probe {
    let drawn = if index == 0 {
        let spec = RepSpec::simple(2, &[&[0, 0]], &[&[1, 0], &[-1, 2]]);
        match spec {
            Ok(spec) => {
                let x = TorusPoint::new(
                    vec![Complex64::new(0.8, 0.0), Complex64::new(0.0, -1.1)],
                    vec![Complex64::new(1.0, 0.5)],
                );
                Ok((spec, x))
            }
            Err(e) => Err(e.into()),
        }
    } else {
        family.torus_instance(usize::MAX / 4 + index)
    };
    let (spec, x) = match drawn {
        Ok(p) => p,
        Err(e) => return Probe::fail(f64::INFINITY, e.to_string(), None),
    };
    let payload = Some(InstancePayload::torus(&spec, &x));
    guarded(payload.clone(), || {
        let delta = moment_polyhedron_T(&spec, &x)?;
        let rays = delta.recession_rays();
        let want_rays: Vec<RatVec> = spec
            .v_support(&x)
            .into_iter()
            .filter(|w| !w.is_zero())
            .map(|w| w.neg())
            .collect();
        let want = VPolyhedron::new(spec.rank(), vec![RatVec::zero(spec.rank())], want_rays)?;
        let got = VPolyhedron::new(spec.rank(), vec![RatVec::zero(spec.rank())], rays)?;
        if !got.set_equal(&want) {
            return Ok(Probe::fail(
                f64::INFINITY,
                "recession cone differs from the negated affine support cone".to_string(),
                payload.clone(),
            ));
        }
        if index == 0 {
            let zero = RatVec::zero(spec.rank());
            if delta.points() != std::slice::from_ref(&zero) {
                return Ok(Probe::fail(
                    f64::INFINITY,
                    "purely affine polyhedron is not a cone with vertex at the origin".to_string(),
                    payload.clone(),
                ));
            }
        }
        // Exact midpoint consistency through the shifted problems.
        let pts = delta.points();
        if pts.len() >= 2 {
            let a = &pts[0];
            let b = &pts[pts.len() - 1];
            let mid = a.add(b).scale(&Rational::new(1.into(), 2.into()));
            let mut all = vec![a.clone(), b.clone(), mid];
            all.retain(|lam| delta.contains(lam));
            for lam in all {
                if let Some(ss) = torus_shifted_semistable(&spec, &x, &lam)? {
                    if !ss {
                        return Ok(Probe::fail(
                            f64::INFINITY,
                            format!(
                                "member {:?} of the moment polyhedron fails the shifted test",
                                lam.strings()
                            ),
                            payload.clone(),
                        ));
                    }
                }
            }
        }
        Ok(Probe::pass(0.0))
    })
}
