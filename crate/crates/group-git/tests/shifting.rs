mod common;

use rand::Rng;

use group_git::{find_highest_slot, shift_point, shift_rep, sl2_sym_weights, tau_flat, GroupSpec, Sl2Rep};
use ratgeom::{rat_int, RatVec, Rational};
use torus_git::{analyze, moment_polyhedron_T, weight_polyhedron, TorusPoint, Verdict};

fn multiset_count(dim: usize, ell: u32) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..ell as u64 {
        acc = acc * (dim as u64 + i) / (i + 1);
    }
    acc
}

/// The flat of the optimal destabilizer lies in the moment polyhedron,
/// and no integral character at most as short (in the dual norm) does.
#[test]
fn the_optimal_character_lies_in_the_moment_polyhedron() {
    let mut rng = common::rng(0x5f1f);
    let mut unstable = 0;
    let mut closer = 0;
    for case in 0..250 {
        let rank = 1 + case % 3;
        let (spec, x) = common::random_torus_instance(&mut rng, rank);
        let tau = match analyze(&spec, &x).unwrap() {
            Verdict::Unstable { tau_x, .. } => tau_x,
            _ => continue,
        };
        unstable += 1;
        let g = GroupSpec::torus(spec.form().clone());
        let (_, flat) = tau_flat(&g, &tau).unwrap();
        let moment = moment_polyhedron_T(&spec, &x).unwrap();
        assert!(moment.contains(&flat));
        let flat_norm = spec.form().dual_norm_sq(&flat);
        for _ in 0..20 {
            let lam = common::random_integral_character(&mut rng, rank);
            if lam == flat || spec.form().dual_norm_sq(&lam) > flat_norm {
                continue;
            }
            closer += 1;
            assert!(
                !moment.contains(&lam),
                "a character at most as short as the optimal one was shifted semistable"
            );
        }
    }
    assert!(unstable >= 60, "only {unstable} unstable draws");
    assert!(closer >= 60, "only {closer} shorter-character probes");
}

/// End-to-end shifting: building the shifted representation and point
/// for the optimal character makes the instance semistable.
#[test]
fn shifting_by_the_optimal_character_restores_semistability() {
    let mut rng = common::rng(0xae70);
    let mut verified = 0;
    for case in 0..400 {
        let rank = 1 + case % 3;
        let (spec, x) = common::random_torus_instance(&mut rng, rank);
        let tau = match analyze(&spec, &x).unwrap() {
            Verdict::Unstable { tau_x, .. } => tau_x,
            _ => continue,
        };
        let g = GroupSpec::torus(spec.form().clone());
        let (ell, lam) = tau_flat(&g, &tau).unwrap();
        if ell > 4 || multiset_count(spec.dim_e(), ell) > 70 {
            continue;
        }
        let highest = lam.scale(&rat_int(ell as i64));
        let shifted_spec = shift_rep(&spec, &g, ell, &lam, &[highest]).unwrap();
        let shifted_x = shift_point(&spec, &x, ell, 1, 0).unwrap();
        assert!(matches!(
            analyze(&shifted_spec, &shifted_x).unwrap(),
            Verdict::Semistable
        ));
        verified += 1;
    }
    assert!(verified >= 25, "only {verified} shifted instances verified");
}

/// For unit multiplier and an arbitrary integral character, the shifted
/// verdict is semistable exactly when the character lies in the moment
/// polyhedron.
#[test]
fn shifted_verdicts_match_membership_in_the_moment_polyhedron() {
    let mut rng = common::rng(0x90c4);
    let (mut inside, mut outside) = (0, 0);
    for case in 0..250 {
        let rank = 1 + case % 2;
        let (spec, x) = common::random_torus_instance(&mut rng, rank);
        let g = GroupSpec::torus(spec.form().clone());
        let moment = moment_polyhedron_T(&spec, &x).unwrap();
        let lam = common::random_integral_character(&mut rng, rank);
        let shifted_spec = shift_rep(&spec, &g, 1, &lam, std::slice::from_ref(&lam)).unwrap();
        let shifted_x = shift_point(&spec, &x, 1, 1, 0).unwrap();
        let unstable = analyze(&shifted_spec, &shifted_x).unwrap().is_unstable();
        if moment.contains(&lam) {
            inside += 1;
            assert!(!unstable);
        } else {
            outside += 1;
            assert!(unstable);
        }
    }
    assert!(inside >= 30 && outside >= 30, "lopsided draw: {inside}/{outside}");
}

/// The instability measure of a shifted instance is the squared dual
/// distance from the character to the moment polyhedron, scaled by the
/// square of the multiplier. Exact.
#[test]
fn shifted_invariant_scales_by_the_square_of_the_multiplier() {
    let mut rng = common::rng(0x7d31);
    let mut checked = 0;
    for case in 0..300 {
        let rank = 1 + case % 2;
        let (spec, x) = common::random_torus_instance(&mut rng, rank);
        if spec.dim_e() > 3 {
            continue;
        }
        let ell: u32 = if spec.dim_e() <= 2 {
            rng.gen_range(1..=3)
        } else {
            rng.gen_range(1..=2)
        };
        let lam = common::random_integral_character(&mut rng, rank);
        let g = GroupSpec::torus(spec.form().clone());
        let highest = lam.scale(&rat_int(ell as i64));
        let shifted_spec = shift_rep(&spec, &g, ell, &lam, &[highest]).unwrap();
        let shifted_x = shift_point(&spec, &x, ell, 1, 0).unwrap();
        let msq = match analyze(&shifted_spec, &shifted_x).unwrap() {
            Verdict::Unstable { msq, .. } => msq,
            _ => continue,
        };
        let p = weight_polyhedron(&spec, &x).unwrap();
        let adj = spec.form().adjugate_form();
        let det = Rational::from_integer(spec.form().det().clone());
        let dual_sqdist = p.sqdist_from(&lam.neg(), &adj).unwrap() / &det;
        let ell_sq = rat_int((ell as i64) * (ell as i64));
        assert_eq!(msq, ell_sq * dual_sqdist);
        checked += 1;
    }
    assert!(checked >= 40, "only {checked} unstable shifted instances");
}

/// Shifting a nonabelian instance scales and translates the weight
/// polyhedron of the shifted point, since the point occupies only the
/// highest-weight slots of the tensor factor.
#[test]
fn sl2_shifted_polyhedron_is_the_scaled_translate() {
    let mut rng = common::rng(0x11b2);
    for _ in 0..60 {
        let rep = Sl2Rep::new(vec![rng.gen_range(1..=2), rng.gen_range(0..=1)], vec![rng.gen_range(0..=2)]);
        let spec = rep.rep_spec().unwrap();
        let g = rep.group();
        let dim_e = spec.dim_e();
        let dim_v = spec.dim_v();
        let live: Vec<usize> = (0..dim_e).filter(|_| rng.gen_bool(0.6)).collect();
        let e_slots = if live.is_empty() { vec![0] } else { live };
        let v_slots: Vec<usize> = (0..dim_v).filter(|_| rng.gen_bool(0.4)).collect();
        let x = TorusPoint::from_slots(&spec, &v_slots, &e_slots);

        let k = rng.gen_range(0..=2i64);
        let ell: u32 = rng.gen_range(1..=2);
        let lam = RatVec::from_ints(&[k]);
        let m = (ell as i64 * k) as usize;
        let irrep: Vec<RatVec> = sl2_sym_weights(m)
            .iter()
            .map(|w| RatVec::from_ints(&[*w]))
            .collect();
        let slot = find_highest_slot(&irrep, ell, &lam).unwrap();
        assert_eq!(slot, 0);
        let shifted_spec = shift_rep(&spec, &g, ell, &lam, &irrep).unwrap();
        let shifted_x = shift_point(&spec, &x, ell, irrep.len(), slot).unwrap();

        let p = weight_polyhedron(&spec, &x).unwrap();
        let expected = p
            .scale(&rat_int(ell as i64))
            .translate(&lam.scale(&rat_int(ell as i64)));
        let got = weight_polyhedron(&shifted_spec, &shifted_x).unwrap();
        assert!(got.set_equal(&expected));
    }
}
