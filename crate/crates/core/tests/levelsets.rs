use std::f64::consts::FRAC_1_SQRT_2;

use lgrad::levelset::{
    cluster_hotspots, continuity_scan, extract_levelsets, nested, refinement_stability, segment_check,
};
use lgrad::scenarios::{get_scenario, Member};

#[test]
fn bm_half_level_hugs_the_lower_chord() {
    let s = get_scenario("bm_disk").unwrap();
    let (grid, _, _) = s.discretize(64).unwrap();
    let u = s.analytic_u_field(&grid, &Member::Lambda(0.5)).unwrap();
    let c = &extract_levelsets(&grid, &u, &[0.25]).unwrap()[0];
    assert_eq!(c.polylines.len(), 1);
    let p = &c.polylines[0];
    assert!(p.points.iter().all(|q| (q[1] + FRAC_1_SQRT_2).abs() <= 2.0 * grid.h));
    assert!(segment_check(&s.anisotropy(), c).unwrap()[0] <= 2.0 * grid.h);
}

#[test]
fn bm_hotspots_lie_on_the_chords() {
    let s = get_scenario("bm_disk").unwrap();
    let (grid, faces, _) = s.discretize(64).unwrap();
    let u = s.analytic_u_field(&grid, &Member::Lambda(0.5)).unwrap();
    let r = continuity_scan(&grid, &faces, &u, &s.flagged_points(), 4.0 * grid.h, None).unwrap();
    assert!(!r.hotspots.is_empty());
    for &k in &r.hotspots {
        let y = grid.center(k)[1];
        assert!((y.abs() - FRAC_1_SQRT_2).abs() <= 2.0 * grid.h, "hotspot at y = {y}");
    }
    assert_eq!(cluster_hotspots(&grid, &r).len(), 2);
}

#[test]
fn disk_arc_analytic_discontinuities_only_at_fan_centers() {
    let s = get_scenario("disk_arc").unwrap();
    let scan = |n: usize| {
        let (grid, faces, _) = s.discretize(n).unwrap();
        let u = s.analytic_u_field(&grid, &Member::Default).unwrap();
        let r = continuity_scan(&grid, &faces, &u, &s.flagged_points(), 4.0 * grid.h, None).unwrap();
        (grid, r)
    };
    let (g1, r1) = scan(64);
    let (g2, r2) = scan(128);
    assert!(r1.trace_err <= 8.0 * g1.h && r2.trace_err <= 8.0 * g2.h);
    let m = refinement_stability(&g1, &r1, &g2, &r2);
    assert_eq!(m.len(), 2);
    for c in &m {
        assert!(c.stable);
        let d = s.flagged_points().iter().map(|p| c.distance_to(&g1, *p)).fold(f64::INFINITY, f64::min);
        assert!(d <= 4.0 * g1.h);
    }
}

#[test]
fn levels_nest() {
    let s = get_scenario("disk_arc").unwrap();
    let (grid, _, _) = s.discretize(64).unwrap();
    let u = s.analytic_u_field(&grid, &Member::Default).unwrap();
    let levels: Vec<f64> = (-3..=3).map(|k| k as f64 * 0.25).collect();
    let c = extract_levelsets(&grid, &u, &levels).unwrap();
    for w in c.windows(2) {
        assert!(nested(&grid, &u, &w[0], &w[1]));
    }
    for curve in &c {
        for p in curve.polylines.iter().filter(|p| !p.closed) {
            for e in [p.endpoints().0, p.endpoints().1] {
                // open polylines end next to the boundary
                let near = (0..16).any(|a| {
                    let th = a as f64 * std::f64::consts::PI / 8.0;
                    !s.inside(e[0] + 2f64.sqrt() * grid.h * th.cos(), e[1] + 2f64.sqrt() * grid.h * th.sin())
                });
                assert!(near, "endpoint {e:?} at t = {}", curve.t);
            }
        }
    }
}

#[test]
fn notch_analytic_has_three_stable_clusters() {
    let s = get_scenario("notch").unwrap();
    let scan = |n: usize| {
        let (grid, faces, _) = s.discretize(n).unwrap();
        let u = s.analytic_u_field(&grid, &Member::Default).unwrap();
        let r = continuity_scan(&grid, &faces, &u, &s.flagged_points(), 4.0 * grid.h, None).unwrap();
        (grid, r)
    };
    let (g1, r1) = scan(64);
    let (g2, r2) = scan(128);
    let m = refinement_stability(&g1, &r1, &g2, &r2);
    assert_eq!(m.len(), 3);
    for p in s.flagged_points() {
        assert_eq!(m.iter().filter(|c| c.stable && c.distance_to(&g1, p) <= 4.0 * g1.h).count(), 1, "{p:?}");
    }
}
