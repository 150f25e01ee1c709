//! Superlevel sets {u ≥ t}, their straightness, and local oscillation of u.
//!
//! Marching squares runs on the dual lattice whose corners are cell centers;
//! a square is processed only when all four corner cells are inside.
//! Ambiguous saddles are resolved by comparing the average of the four
//! corners with the level.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::anisotropy::{MetricIntegrand, Vec2};
use crate::error::{Error, Result};
use crate::grid::{BoundaryFace, Dir, DomainGrid, ScalarField};

/// Default hotspot threshold as a fraction of the datum range. Jumps of a
/// quarter of the range must clear it.
pub const HOTSPOT_FRACTION: f64 = 0.15;

#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<Vec2>,
    pub closed: bool,
    /// Smallest |Δu| across the lattice edges the polyline crosses.
    pub min_step: f64,
}

impl Polyline {
    pub fn endpoints(&self) -> (Vec2, Vec2) {
        (self.points[0], *self.points.last().unwrap())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelCurve {
    pub t: f64,
    pub polylines: Vec<Polyline>,
}

impl LevelCurve {
    /// Drop polylines lying inside a jump band of u: every edge they cross
    /// steps by more than `jump`.
    pub fn without_jump_bands(&self, jump: f64) -> LevelCurve {
        LevelCurve { t: self.t, polylines: self.polylines.iter().filter(|p| p.min_step <= jump).cloned().collect() }
    }
}

/// Lattice edge between two adjacent cell centers: horizontal from (i, j) to
/// (i+1, j) or vertical from (i, j) to (i, j+1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

fn ends(grid: &DomainGrid, e: Edge) -> (usize, usize) {
    match e {
        Edge::H(i, j) => (grid.index(i, j), grid.index(i + 1, j)),
        Edge::V(i, j) => (grid.index(i, j), grid.index(i, j + 1)),
    }
}

fn step(grid: &DomainGrid, u: &ScalarField, e: Edge) -> f64 {
    let (a, b) = ends(grid, e);
    (u.values[b] - u.values[a]).abs()
}

fn crossing(grid: &DomainGrid, u: &ScalarField, t: f64, e: Edge) -> Vec2 {
    let (a, b) = ends(grid, e);
    let (ua, ub) = (u.values[a], u.values[b]);
    let s = ((t - ua) / (ub - ua)).clamp(0.0, 1.0);
    let (pa, pb) = (grid.center(a), grid.center(b));
    [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])]
}

/// Segments of one square as pairs of crossed edges.
fn square_segments(grid: &DomainGrid, u: &ScalarField, t: f64, i: usize, j: usize, out: &mut Vec<(Edge, Edge)>) {
    let c = [grid.index(i, j), grid.index(i + 1, j), grid.index(i + 1, j + 1), grid.index(i, j + 1)];
    let v = c.map(|k| u.values[k]);
    let up = v.map(|x| x >= t);
    // bottom, right, top, left
    let edges = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
    let cut = [up[0] != up[1], up[1] != up[2], up[3] != up[2], up[0] != up[3]];
    let crossed: Vec<usize> = (0..4).filter(|&e| cut[e]).collect();
    match crossed.len() {
        2 => out.push((edges[crossed[0]], edges[crossed[1]])),
        4 => {
            let center_up = (v[0] + v[1] + v[2] + v[3]) / 4.0 >= t;
            if center_up == up[0] {
                // corners 0 and 2 are joined through the center
                out.push((edges[0], edges[1]));
                out.push((edges[2], edges[3]));
            } else {
                out.push((edges[0], edges[3]));
                out.push((edges[1], edges[2]));
            }
        }
        _ => {}
    }
}

fn extract_one(grid: &DomainGrid, u: &ScalarField, t: f64) -> LevelCurve {
    let mut segs = Vec::new();
    for j in 0..grid.ny.saturating_sub(1) {
        for i in 0..grid.nx.saturating_sub(1) {
            let all_in =
                [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)].iter().all(|&(a, b)| grid.is_inside(grid.index(a, b)));
            if all_in {
                square_segments(grid, u, t, i, j, &mut segs);
            }
        }
    }
    let mut adj: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (s, &(a, b)) in segs.iter().enumerate() {
        adj.entry(a).or_default().push(s);
        adj.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segs.len()];
    let mut polylines = Vec::new();
    let walk = |start: Edge, used: &mut Vec<bool>| -> Option<Polyline> {
        let mut chain = vec![start];
        let mut at = start;
        loop {
            let next = adj[&at].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (a, b) = segs[s];
            at = if a == at { b } else { a };
            chain.push(at);
        }
        if chain.len() < 2 {
            return None;
        }
        let closed = chain.len() > 2 && chain[0] == *chain.last().unwrap();
        Some(Polyline {
            points: chain.iter().map(|&e| crossing(grid, u, t, e)).collect(),
            closed,
            min_step: chain.iter().map(|&e| step(grid, u, e)).fold(f64::INFINITY, f64::min),
        })
    };
    let open_ends: Vec<Edge> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(e, _)| *e).collect();
    for e in open_ends {
        if let Some(p) = walk(e, &mut used) {
            polylines.push(p);
        }
    }
    let keys: Vec<Edge> = adj.keys().copied().collect();
    for e in keys {
        if let Some(p) = walk(e, &mut used) {
            polylines.push(p);
        }
    }
    LevelCurve { t, polylines }
}

/// Level curves of u at each level, in the order given. Levels outside the
/// range of u yield curves without polylines.
pub fn extract_levelsets(grid: &DomainGrid, u: &ScalarField, levels: &[f64]) -> Result<Vec<LevelCurve>> {
    crate::grid::check_len(grid, u.len())?;
    Ok(crate::exec::map_rows(levels.len(), true, |l| extract_one(grid, u, levels[l])))
}

fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - s * d[0]).hypot(p[1] - a[1] - s * d[1])
}

/// Hausdorff distance between a polyline and the chord joining its
/// endpoints. The chord-to-polyline direction is sampled at 8 points per
/// polyline vertex.
pub fn polyline_deviation(p: &Polyline) -> f64 {
    let (a, b) = p.endpoints();
    let to_chord = p.points.iter().map(|&q| point_segment_distance(q, a, b)).fold(0.0, f64::max);
    let samples = 8 * p.points.len();
    let to_line = (0..=samples)
        .map(|s| {
            let r = s as f64 / samples as f64;
            let q = [a[0] + r * (b[0] - a[0]), a[1] + r * (b[1] - a[1])];
            p.points.windows(2).map(|w| point_segment_distance(q, w[0], w[1])).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    to_chord.max(if p.points.len() > 1 { to_line } else { 0.0 })
}

/// Deviation from straightness of every polyline of `curve`. Only isotropic
/// integrands have straight minimal level lines.
pub fn segment_check(m: &MetricIntegrand, curve: &LevelCurve) -> Result<Vec<f64>> {
    if !m.is_euclidean() {
        return Err(Error::UnsupportedAnisotropy(format!("level lines of {m} need not be segments")));
    }
    Ok(curve.polylines.iter().map(polyline_deviation).collect())
}

/// CSV rows `t,polyline_id,x,y`.
pub fn format_levelsets_csv(curves: &[LevelCurve]) -> String {
    let mut s = String::from("t,polyline_id,x,y\n");
    for c in curves {
        for (id, p) in c.polylines.iter().enumerate() {
            for q in &p.points {
                writeln!(s, "{:?},{id},{:?},{:?}", c.t, q[0], q[1]).unwrap();
            }
        }
    }
    s
}

pub fn save_levelsets_csv(path: &Path, curves: &[LevelCurve]) -> Result<()> {
    fs::write(path, format_levelsets_csv(curves))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityReport {
    /// max − min of u over the inside cells of each 3×3 block; 0 off Ω.
    pub osc: ScalarField,
    /// max |u_cell − f| over Dirichlet faces outside the exclusion disks.
    pub trace_err: f64,
    /// Center of the face attaining `trace_err`.
    pub trace_err_at: Option<Vec2>,
    pub hotspot_thresh: f64,
    /// Cells with osc above the threshold, ascending.
    pub hotspots: Vec<usize>,
}

impl ContinuityReport {
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        writeln!(s, "trace_err={:e}", self.trace_err).unwrap();
        if let Some(p) = self.trace_err_at {
            writeln!(s, "trace_err_x={:?}", p[0]).unwrap();
            writeln!(s, "trace_err_y={:?}", p[1]).unwrap();
        }
        writeln!(s, "max_osc={:e}", self.osc.values.iter().copied().fold(0.0, f64::max)).unwrap();
        writeln!(s, "hotspot_thresh={:e}", self.hotspot_thresh).unwrap();
        writeln!(s, "hotspots={}", self.hotspots.len()).unwrap();
        s
    }
}

/// Oscillation and trace error of u. `exclusion` lists boundary points whose
/// `radius`-disks are skipped by the trace error; `hotspot_thresh = None`
/// selects 0.15·(max f − min f).
pub fn continuity_scan(
    grid: &DomainGrid,
    faces: &[BoundaryFace],
    u: &ScalarField,
    exclusion: &[Vec2],
    radius: f64,
    hotspot_thresh: Option<f64>,
) -> Result<ContinuityReport> {
    crate::grid::check_len(grid, u.len())?;
    let mut osc = ScalarField::zeros(grid);
    for k in grid.inside_cells() {
        let (i, j) = grid.coords(k);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for b in j.saturating_sub(1)..=(j + 1).min(grid.ny - 1) {
            for a in i.saturating_sub(1)..=(i + 1).min(grid.nx - 1) {
                let q = grid.index(a, b);
                if grid.is_inside(q) {
                    lo = lo.min(u.values[q]);
                    hi = hi.max(u.values[q]);
                }
            }
        }
        osc.values[k] = hi - lo;
    }
    let (mut flo, mut fhi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut trace_err = 0.0f64;
    let mut trace_err_at = None;
    for face in faces.iter().filter(|f| f.is_gamma()) {
        let f = face.f_value.unwrap_or(f64::NAN);
        flo = flo.min(f);
        fhi = fhi.max(f);
        let c = face.center;
        if exclusion.iter().any(|p| (c[0] - p[0]).hypot(c[1] - p[1]) < radius) {
            continue;
        }
        let e = (u.values[face.cell] - f).abs();
        if e > trace_err || trace_err_at.is_none() {
            trace_err = trace_err.max(e);
            trace_err_at = Some(c);
        }
    }
    let thresh = hotspot_thresh.unwrap_or(if flo <= fhi { HOTSPOT_FRACTION * (fhi - flo) } else { 0.0 });
    let hotspots = grid.inside_cells().filter(|&k| osc.values[k] > thresh).collect();
    Ok(ContinuityReport { osc, trace_err, trace_err_at, hotspot_thresh: thresh, hotspots })
}

/// An 8-connected group of hotspot cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub cells: Vec<usize>,
    pub centroid: Vec2,
    pub max_osc: f64,
}

pub fn cluster_hotspots(grid: &DomainGrid, report: &ContinuityReport) -> Vec<Cluster> {
    let hot: BTreeSet<usize> = report.hotspots.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut clusters = Vec::new();
    for &start in &report.hotspots {
        if !seen.insert(start) {
            continue;
        }
        let mut cells = vec![start];
        let mut stack = vec![start];
        while let Some(k) = stack.pop() {
            let (i, j) = grid.coords(k);
            for b in j.saturating_sub(1)..=(j + 1).min(grid.ny - 1) {
                for a in i.saturating_sub(1)..=(i + 1).min(grid.nx - 1) {
                    let q = grid.index(a, b);
                    if hot.contains(&q) && seen.insert(q) {
                        cells.push(q);
                        stack.push(q);
                    }
                }
            }
        }
        cells.sort_unstable();
        let mut c = [0.0, 0.0];
        for &k in &cells {
            let p = grid.center(k);
            c = [c[0] + p[0], c[1] + p[1]];
        }
        let n = cells.len() as f64;
        let max_osc = cells.iter().map(|&k| report.osc.values[k]).fold(0.0, f64::max);
        clusters.push(Cluster { cells, centroid: [c[0] / n, c[1] / n], max_osc });
    }
    clusters
}

/// A coarse cluster and its counterpart on the refined grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterMatch {
    pub coarse: Cluster,
    pub fine: Option<Cluster>,
    /// fine.max_osc / coarse.max_osc, 0 when unmatched.
    pub ratio: f64,
    /// The oscillation does not decay with h: ratio > 0.5.
    pub stable: bool,
}

impl ClusterMatch {
    /// Distance from the nearest coarse cell center to `p`.
    pub fn distance_to(&self, grid: &DomainGrid, p: Vec2) -> f64 {
        self.coarse
            .cells
            .iter()
            .map(|&k| {
                let c = grid.center(k);
                (c[0] - p[0]).hypot(c[1] - p[1])
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Match hotspot clusters between a grid and its refinement. A fine cluster
/// matches when one of its cells lies within 4 coarse widths of a coarse
/// cell; among matches the one with the largest oscillation is kept.
pub fn refinement_stability(
    coarse_grid: &DomainGrid,
    coarse: &ContinuityReport,
    fine_grid: &DomainGrid,
    fine: &ContinuityReport,
) -> Vec<ClusterMatch> {
    let radius = 4.0 * coarse_grid.h;
    let fine_clusters = cluster_hotspots(fine_grid, fine);
    cluster_hotspots(coarse_grid, coarse)
        .into_iter()
        .map(|c| {
            let best = fine_clusters
                .iter()
                .filter(|f| {
                    c.cells.iter().any(|&a| {
                        let pa = coarse_grid.center(a);
                        f.cells.iter().any(|&b| {
                            let pb = fine_grid.center(b);
                            (pa[0] - pb[0]).hypot(pa[1] - pb[1]) <= radius
                        })
                    })
                })
                .max_by(|a, b| a.max_osc.total_cmp(&b.max_osc))
                .cloned();
            let ratio = best.as_ref().map_or(0.0, |f| f.max_osc / c.max_osc);
            ClusterMatch { coarse: c, fine: best, ratio, stable: ratio > 0.5 }
        })
        .collect()
}

/// Whether a superlevel region at `s` lies inside that at `t < s` at every
/// vertex of the `s` curves: a vertex on edge (a, b) has u ≥ s ≥ t at one
/// end, which must be covered by {u ≥ t}.
pub fn nested(grid: &DomainGrid, u: &ScalarField, lower: &LevelCurve, upper: &LevelCurve) -> bool {
    if lower.t > upper.t {
        return false;
    }
    upper.polylines.iter().flat_map(|p| p.points.iter()).all(|&q| {
        let k = nearest_inside_cell(grid, q);
        k.is_none_or(|k| {
            let mut hi = u.values[k];
            for d in [Dir::East, Dir::West, Dir::North, Dir::South] {
                if let Some(n) = grid.neighbor(k, d).filter(|&n| grid.is_inside(n)) {
                    hi = hi.max(u.values[n]);
                }
            }
            hi >= lower.t
        })
    })
}

fn nearest_inside_cell(grid: &DomainGrid, p: Vec2) -> Option<usize> {
    let i = ((p[0] - grid.origin[0]) / grid.h - 0.5).round();
    let j = ((p[1] - grid.origin[1]) / grid.h - 0.5).round();
    if i < 0.0 || j < 0.0 || i as usize >= grid.nx || j as usize >= grid.ny {
        return None;
    }
    let k = grid.index(i as usize, j as usize);
    grid.is_inside(k).then_some(k)
}
