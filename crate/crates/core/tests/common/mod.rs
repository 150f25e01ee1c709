//! Geometry oracles for the scenario optima, built from the domain predicates
//! and the level-line structure of each example via the coarea formula.

#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use lgrad::scenarios::{get_scenario, Scenario};

/// Distance from `p` to the boundary of the domain along the unit vector
/// `d`, starting slightly off `p` so boundary starting points work too; 0
/// when the ray leaves the domain at once.
pub fn exit_distance(s: &Scenario, p: [f64; 2], d: [f64; 2]) -> f64 {
    let at = |r: f64| s.inside(p[0] + r * d[0], p[1] + r * d[1]);
    let step = 1e-3;
    let mut lo = 1e-9;
    if !at(lo) {
        return 0.0;
    }
    while at(lo + step) {
        lo += step;
    }
    let mut hi = lo + step;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if at(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Composite Simpson rule on [a, b] with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let r = v[0].hypot(v[1]);
    [v[0] / r, v[1] / r]
}

/// Length of the segment from `center` to the lower boundary point above
/// which x = t.
fn fan_segment(s: &Scenario, center: [f64; 2], t: f64) -> f64 {
    let y = -exit_distance(s, [t, 0.0], [0.0, -1.0]);
    (t - center[0]).hypot(y - center[1])
}

/// Oracle value of the minimal total variation.
pub fn oracle_optimum(name: &str) -> f64 {
    let s = get_scenario(name).unwrap();
    let panels = 20_000;
    match name {
        // every level t ∈ (0, 1) is the horizontal line y = 1/2
        "square_updown" => exit_distance(&s, [0.0, 0.5], [1.0, 0.0]),
        // levels in (0, λ) are the lower chord, (λ, 1) the upper one; take λ = 1/2
        "bm_disk" => {
            let chord = |y: f64| exit_distance(&s, [0.0, y], [1.0, 0.0]) + exit_distance(&s, [0.0, y], [-1.0, 0.0]);
            0.5 * chord(-FRAC_1_SQRT_2) + 0.5 * chord(FRAC_1_SQRT_2)
        }
        "disk_arc" => {
            simpson(|t| fan_segment(&s, [1.0, 0.0], t), 0.0, 1.0, panels)
                + simpson(|t| fan_segment(&s, [-1.0, 0.0], t), -1.0, 0.0, panels)
        }
        "notch" => {
            let middle = |t: f64| {
                let d = unit([t, -(1.0 - t * t).sqrt()]);
                exit_distance(&s, [0.0, 0.0], d)
            };
            simpson(|t| fan_segment(&s, [1.0, 0.0], t), 0.5, 1.0, panels)
                + simpson(|t| fan_segment(&s, [-1.0, 0.0], t), -1.0, -0.5, panels)
                + simpson(middle, -0.5, 0.5, panels)
        }
        // linear profile: level t is the ray at angle tπ/2
        "fan3" => simpson(
            |t| {
                let a = (t * FRAC_PI_2).clamp(1e-9, FRAC_PI_2 - 1e-9);
                exit_distance(&s, [0.0, 0.0], [a.cos(), a.sin()])
            },
            0.0,
            1.0,
            2_000,
        ),
        _ => panic!("no oracle for {name}"),
    }
}

/// Closed form of the fan construction: t = 1 − 2d_x² around (1, 0)
/// and t = −1 + 2d_x² around (−1, 0), with d the unit direction from the center.
pub fn fan_closed_form(center: [f64; 2], x: f64, y: f64) -> f64 {
    let d = unit([x - center[0], y - center[1]]);
    if center[0] > 0.0 {
        1.0 - 2.0 * d[0] * d[0]
    } else {
        -1.0 + 2.0 * d[0] * d[0]
    }
}
