mod common;

use common::{fan_closed_form, oracle_optimum};
use lgrad::certify::{verify_calibration, Tolerances};
use lgrad::operators::{dual_objective, primal_objective};
use lgrad::scenarios::{all, fan_level, get_scenario, Member, Profile, Values, Which};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn optima_match_geometry_oracles() {
    for s in all() {
        let oracle = oracle_optimum(s.name);
        let stated = s.optimum().value;
        assert!((oracle - stated).abs() <= 1e-6, "{}: oracle {oracle} stated {stated}", s.name);
    }
}

#[test]
fn fan_bisection_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = get_scenario("disk_arc").unwrap();
    let mut checked = 0;
    while checked < 2000 {
        let (x, y): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..0.0));
        if x * x + y * y >= 1.0 || y > x.abs() - 1.0 {
            continue;
        }
        let center = if x > 0.0 { [1.0, 0.0] } else { [-1.0, 0.0] };
        let want = fan_closed_form(center, x, y);
        let (lo, hi) = if x > 0.0 { (0.0, 1.0) } else { (-1.0, 0.0) };
        assert!((fan_level(center, lo, hi, x, y) - want).abs() <= 1e-9, "({x}, {y})");
        let u = s.eval_u(&Member::Default, x, y).unwrap();
        assert!((u - want).abs() <= 1e-9);
        checked += 1;
    }
}

#[test]
fn point_values() {
    let bm = get_scenario("bm_disk").unwrap();
    match bm.eval_analytic(&Which::U(Member::Lambda(0.25)), &[[0.0, 0.0]]).unwrap() {
        Values::Scalar(v) => assert_eq!(v, vec![0.25]),
        _ => panic!(),
    }
    let da = get_scenario("disk_arc").unwrap();
    let t = da.eval_u(&Member::Default, 0.9, -0.3).unwrap();
    assert!(t > 0.0 && t < 1.0);
    assert!((t - fan_closed_form([1.0, 0.0], 0.9, -0.3)).abs() < 1e-9);
    // (0.9, −0.1) lies on the segment l_0 from (1, 0) towards (0, −1)
    assert!(da.eval_u(&Member::Default, 0.9, -0.1).unwrap().abs() < 1e-9);
    assert!(get_scenario("nosuch").is_err());
}

/// Analytic objectives approach the optimum at rate h, and calibration
/// passes at grid tolerances on every resolution.
#[test]
fn analytic_pairs_converge_and_certify() {
    for s in all() {
        let opt = oracle_optimum(s.name);
        let mut last = f64::INFINITY;
        for n in [64usize, 128, 256] {
            let (grid, faces, op) = s.discretize(n).unwrap();
            let m = s.anisotropy();
            let u = s.analytic_u_field(&grid, &s.default_member()).unwrap();
            let z = s.analytic_z_field(&grid, &op).unwrap();
            let p = primal_objective(&m, &op, &u).unwrap();
            let d = dual_objective(&op, &z).unwrap();
            let err = (p - opt).abs().max((d - opt).abs());
            assert!(err <= 10.0 * opt / n as f64, "{} n={n}: primal {p} dual {d} opt {opt}", s.name);
            assert!(err <= last + 1e-12, "{} n={n}: error grew", s.name);
            last = err;
            let t = Tolerances::grid_scale(n as f64).excluding(s.flagged_points());
            let r = verify_calibration(&m, &grid, &faces, &u, &z, &t).unwrap();
            assert!(r.pass, "{} n={n}: {r:?}", s.name);
        }
    }
}

#[test]
fn family_members_share_the_objective() {
    let n = 128;
    let slack = 2.0 * 10.0 / n as f64;
    for (name, members) in [
        ("bm_disk", (0..=4).map(|i| Member::Lambda(i as f64 / 4.0)).collect::<Vec<_>>()),
        (
            "fan3",
            vec![
                Member::Profile(Profile::Linear),
                Member::Profile(Profile::Table(vec![0.0, 0.05, 0.2, 0.5, 0.8, 0.95, 1.0])),
                Member::Profile(Profile::Table(vec![0.0, 0.6, 0.9, 1.0])),
            ],
        ),
        ("square_updown", vec![Member::Profile(Profile::Linear), Member::Profile(Profile::Step { at: 0.5 })]),
    ] {
        let s = get_scenario(name).unwrap();
        let (grid, _, op) = s.discretize(n).unwrap();
        let vals: Vec<f64> = members
            .iter()
            .map(|mm| primal_objective(&s.anisotropy(), &op, &s.analytic_u_field(&grid, mm).unwrap()).unwrap())
            .collect();
        let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        assert!(hi - lo <= slack * s.optimum().value, "{name}: {vals:?}");
    }
}

#[test]
fn invalid_family_parameters_rejected() {
    let bm = get_scenario("bm_disk").unwrap();
    assert!(bm.eval_u(&Member::Lambda(1.5), 0.0, 0.0).is_err());
    let fan = get_scenario("fan3").unwrap();
    assert!(fan.eval_u(&Member::Profile(Profile::Table(vec![0.0, 0.7, 0.3, 1.0])), 1.0, 1.0).is_err());
    assert!(fan.eval_u(&Member::Lambda(0.5), 1.0, 1.0).is_err());
}
