//! Residuals of the calibration conditions for a pair (u, z).
//!
//! * `r_div`: largest |div z| over interior cells (all four neighbors inside);
//! * `r_feas`: overshoot of φ⁰(x, z) beyond 1 on any slot;
//! * `r_pair`: relative mismatch between Σ h² z·g and Σ h² φ(x, g);
//! * `r_sign`: largest |[z, ν]·sign(f − u) − φ(x, ν)| over Dirichlet faces
//!   where |f − u| exceeds the jump threshold;
//! * `r_neumann`: the normal trace on Neumann faces, 0 by construction.
//!
//! The normal trace on a Dirichlet face is the outward component of the slot
//! that carries it; faces meeting at a raster corner are checked separately.

use std::fmt::Write as _;

use crate::anisotropy::{MetricIntegrand, Vec2};
use crate::error::{Error, Result};
use crate::grid::{BoundaryFace, DomainGrid, FaceKind, ScalarField, VectorField};
use crate::operators::{dual_objective, pairing_density, primal_objective, GradientOperator};

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub r_div: f64,
    pub r_feas: f64,
    pub r_pair: f64,
    pub r_sign: f64,
    /// Faces with |f − u| at or below this are exempt from the sign check;
    /// `None` selects 0.05·(max f − min f).
    pub jump_thresh: Option<f64>,
    /// Points near which the sign check is skipped (discontinuities of u
    /// at the boundary, where the cell value cannot match f).
    pub sign_exclusion: Vec<Vec2>,
    /// Exclusion radius in cell widths.
    pub exclusion_cells: f64,
}

impl Tolerances {
    /// Grid-scale tolerances for closed-form pairs at `n` cells per unit:
    /// r_div ≤ 5/n, r_feas ≤ 1e-12, r_pair ≤ 5/√n, r_sign ≤ 0.1.
    pub fn grid_scale(n: f64) -> Self {
        Self {
            r_div: 5.0 / n,
            r_feas: 1e-12,
            r_pair: 5.0 / n.sqrt(),
            r_sign: 0.1,
            jump_thresh: None,
            sign_exclusion: Vec::new(),
            exclusion_cells: 4.0,
        }
    }

    /// Tolerances matched to a solver run with relative gap `gap_tol` on a
    /// grid of spacing `h`.
    pub fn for_solver(gap_tol: f64, h: f64) -> Self {
        Self {
            r_div: 10.0 * gap_tol / h,
            r_feas: 0.0,
            r_pair: 10.0 * gap_tol,
            r_sign: 0.1,
            jump_thresh: None,
            sign_exclusion: Vec::new(),
            exclusion_cells: 4.0,
        }
    }

    /// Skip the sign check within `exclusion_cells`·h of these points.
    pub fn excluding(mut self, points: Vec<Vec2>) -> Self {
        self.sign_exclusion = points;
        self
    }

    fn validate(&self) -> Result<()> {
        let all = [self.r_div, self.r_feas, self.r_pair, self.r_sign, self.exclusion_cells];
        if all.iter().any(|t| !(*t >= 0.0)) || self.jump_thresh.is_some_and(|j| !(j >= 0.0)) {
            return Err(Error::InvalidArgument(format!("tolerances must be nonnegative: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationReport {
    pub r_div: f64,
    pub r_feas: f64,
    pub r_pair: f64,
    pub r_sign: f64,
    pub r_neumann: f64,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub jump_thresh: f64,
    /// Dirichlet faces on which the sign condition was enforced.
    pub sign_faces: usize,
    pub tolerances: Tolerances,
    pub pass: bool,
}

impl CalibrationReport {
    /// Re-evaluate the pass flag at other tolerances.
    pub fn passes(&self, t: &Tolerances) -> bool {
        self.r_div <= t.r_div
            && self.r_feas <= t.r_feas
            && self.r_pair <= t.r_pair
            && self.r_sign <= t.r_sign
            && self.r_neumann == 0.0
    }

    /// Flat `key=value` block.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        let t = &self.tolerances;
        for (k, v) in [
            ("r_div", self.r_div),
            ("r_feas", self.r_feas),
            ("r_pair", self.r_pair),
            ("r_sign", self.r_sign),
            ("r_neumann", self.r_neumann),
            ("primal", self.primal),
            ("dual", self.dual),
            ("gap", self.gap),
            ("jump_thresh", self.jump_thresh),
            ("tol_r_div", t.r_div),
            ("tol_r_feas", t.r_feas),
            ("tol_r_pair", t.r_pair),
            ("tol_r_sign", t.r_sign),
            ("exclusion_cells", t.exclusion_cells),
        ] {
            writeln!(s, "{k}={v:e}").unwrap();
        }
        writeln!(s, "sign_faces={}", self.sign_faces).unwrap();
        writeln!(s, "neumann_trace=0 (defined)").unwrap();
        writeln!(s, "pass={}", self.pass).unwrap();
        s
    }
}

fn datum_range(faces: &[BoundaryFace]) -> (f64, f64) {
    faces
        .iter()
        .filter_map(|f| f.f_value.filter(|_| f.is_gamma()))
        .fold(None, |acc: Option<(f64, f64)>, v| Some(acc.map_or((v, v), |(lo, hi)| (lo.min(v), hi.max(v)))))
        .unwrap_or((0.0, 0.0))
}

/// Default jump threshold for a face set: 0.05·(max f − min f).
pub fn default_jump_thresh(faces: &[BoundaryFace]) -> f64 {
    let (lo, hi) = datum_range(faces);
    0.05 * (hi - lo)
}

fn check_shapes(grid: &DomainGrid, u: &ScalarField, z: &VectorField) -> Result<()> {
    for (what, len) in [("u", u.len()), ("z_x", z.x.len()), ("z_y", z.y.len())] {
        if len != grid.len() {
            return Err(Error::ShapeMismatch(format!("{what} has {len} entries, grid has {}", grid.len())));
        }
    }
    Ok(())
}

/// Residuals of the calibration conditions for (u, z).
pub fn verify_calibration(
    m: &MetricIntegrand,
    grid: &DomainGrid,
    faces: &[BoundaryFace],
    u: &ScalarField,
    z: &VectorField,
    tols: &Tolerances,
) -> Result<CalibrationReport> {
    check_shapes(grid, u, z)?;
    tols.validate()?;
    let op = GradientOperator::new(grid, faces, true)?;
    let jump_thresh = tols.jump_thresh.unwrap_or_else(|| default_jump_thresh(faces));
    verify_with(m, grid, faces, &op, u, z, tols, jump_thresh)
}

#[allow(clippy::too_many_arguments)]
fn verify_with(
    m: &MetricIntegrand,
    grid: &DomainGrid,
    faces: &[BoundaryFace],
    op: &GradientOperator,
    u: &ScalarField,
    z: &VectorField,
    tols: &Tolerances,
    jump_thresh: f64,
) -> Result<CalibrationReport> {
    let mut z = z.clone();
    op.canonicalize(&mut z);
    let norm = m.norm();

    let div = op.div_adjoint(&z)?;
    let r_div =
        grid.inside_cells().filter(|&k| grid.is_interior(k)).fold(0.0f64, |acc, k| acc.max(div.values[k].abs()));

    let mut max_polar = 0.0f64;
    for k in 0..grid.len() {
        if op.is_inside(k) || op.active_x()[k] || op.active_y()[k] {
            max_polar = max_polar.max(op.polar_cell(m, norm, z.x[k], z.y[k], k));
        }
    }
    let r_feas = (max_polar - 1.0).max(0.0);

    let (pair, phi) = pairing_density(m, op, u, &z)?;
    let h2 = grid.h * grid.h;
    let sum_pair: f64 = pair.values.iter().sum::<f64>() * h2;
    let sum_phi: f64 = phi.values.iter().sum::<f64>() * h2;
    let r_pair = (sum_pair - sum_phi).abs() / sum_phi.max(1.0);

    let radius = tols.exclusion_cells * grid.h;
    let near = |c: Vec2| tols.sign_exclusion.iter().any(|p| (c[0] - p[0]).hypot(c[1] - p[1]) < radius);
    let mut r_sign = 0.0f64;
    let mut sign_faces = 0;
    for gs in op.gamma_slots() {
        let diff = gs.f - u.values[gs.cell];
        let face = &faces[gs.face];
        if diff.abs() <= jump_thresh || near(face.center) {
            continue;
        }
        sign_faces += 1;
        let phi_nu = MetricIntegrand::phi_with(norm, m.weight(gs.cell), face.normal);
        let zn = op.normal_trace(&z, gs);
        r_sign = r_sign.max((zn * diff.signum() - phi_nu).abs());
    }

    let primal = primal_objective(m, op, u)?;
    let dual = dual_objective(op, &z)?;
    let mut report = CalibrationReport {
        r_div,
        r_feas,
        r_pair,
        r_sign,
        r_neumann: 0.0,
        primal,
        dual,
        gap: primal - dual,
        jump_thresh,
        sign_faces,
        tolerances: tols.clone(),
        pass: false,
    };
    report.pass = report.passes(tols);
    Ok(report)
}

/// Check one field z against several candidate solutions.
pub fn cross_certify(
    m: &MetricIntegrand,
    grid: &DomainGrid,
    faces: &[BoundaryFace],
    z: &VectorField,
    u_list: &[ScalarField],
    tols: &Tolerances,
) -> Result<Vec<CalibrationReport>> {
    tols.validate()?;
    let op = GradientOperator::new(grid, faces, true)?;
    let jump_thresh = tols.jump_thresh.unwrap_or_else(|| default_jump_thresh(faces));
    u_list
        .iter()
        .map(|u| {
            check_shapes(grid, u, z)?;
            verify_with(m, grid, faces, &op, u, z, tols, jump_thresh)
        })
        .collect()
}

/// Enlarge Γ to Γ′ with datum f̃ = u on the new faces and re-verify the same
/// z. The jump threshold is taken from the original Γ.
pub fn extend_gamma_check<G>(
    m: &MetricIntegrand,
    grid: &DomainGrid,
    faces: &[BoundaryFace],
    u: &ScalarField,
    z: &VectorField,
    gamma_prime: G,
    tols: &Tolerances,
) -> Result<CalibrationReport>
where
    G: Fn(f64, f64) -> bool,
{
    check_shapes(grid, u, z)?;
    tols.validate()?;
    for (i, f) in faces.iter().enumerate() {
        if f.is_gamma() && !gamma_prime(f.center[0], f.center[1]) {
            return Err(Error::Precondition(format!("Γ face {i} at ({}, {}) is not in Γ′", f.center[0], f.center[1])));
        }
    }
    let extended: Vec<BoundaryFace> = faces
        .iter()
        .map(|f| {
            if !f.is_gamma() && gamma_prime(f.center[0], f.center[1]) {
                BoundaryFace { kind: FaceKind::Gamma, f_value: Some(u.values[f.cell]), ..f.clone() }
            } else {
                f.clone()
            }
        })
        .collect();
    let jump_thresh = tols.jump_thresh.unwrap_or_else(|| default_jump_thresh(faces));
    let mut z = z.clone();
    GradientOperator::new(grid, faces, true)?.canonicalize(&mut z);
    let op = GradientOperator::new(grid, &extended, true)?;
    verify_with(m, grid, &extended, &op, u, &z, tols, jump_thresh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{rasterize, BBox};

    fn square(n: usize) -> (DomainGrid, Vec<BoundaryFace>) {
        rasterize(
            |x, y| x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0,
            |_, y| y < 1e-9 || y > 1.0 - 1e-9,
            |_, y| if y > 0.5 { 1.0 } else { 0.0 },
            BBox::new([0.0, 0.0], [1.0, 1.0]),
            n,
        )
        .unwrap()
    }

    /// z = (0, 1) on every active slot.
    fn up(grid: &DomainGrid, faces: &[BoundaryFace]) -> VectorField {
        let op = GradientOperator::new(grid, faces, true).unwrap();
        let mut z = VectorField::constant(grid, [0.0, 1.0]);
        op.canonicalize(&mut z);
        z
    }

    #[test]
    fn analytic_square_pair_passes() {
        let (grid, faces) = square(32);
        let m = MetricIntegrand::euclidean();
        let u = ScalarField::from_fn(&grid, |_, y| y);
        let r = verify_calibration(&m, &grid, &faces, &u, &up(&grid, &faces), &Tolerances::grid_scale(32.0)).unwrap();
        assert!(r.pass, "{r:?}");
        for v in [r.r_div, r.r_feas, r.r_pair, r.r_sign] {
            assert!(v <= 1e-10, "{r:?}");
        }
        assert!(r.gap.abs() < 1e-12);
    }

    #[test]
    fn anti_aligned_field_fails_pairing() {
        let (grid, faces) = square(32);
        let m = MetricIntegrand::euclidean();
        let u = ScalarField::from_fn(&grid, |_, y| y);
        let z = up(&grid, &faces).scaled(-1.0);
        let r = verify_calibration(&m, &grid, &faces, &u, &z, &Tolerances::grid_scale(32.0)).unwrap();
        assert!(!r.pass);
        assert!((r.r_pair - 2.0).abs() < 1e-12);
    }

    #[test]
    fn overshoot_reported() {
        let (grid, faces) = square(16);
        let m = MetricIntegrand::euclidean();
        let u = ScalarField::from_fn(&grid, |_, y| y);
        let z = up(&grid, &faces).scaled(1.2);
        let r = verify_calibration(&m, &grid, &faces, &u, &z, &Tolerances::grid_scale(16.0)).unwrap();
        assert!((r.r_feas - 0.2).abs() < 1e-12);
        assert!(!r.pass);
    }

    #[test]
    fn zero_field_fails_against_ramp() {
        let (grid, faces) = square(16);
        let m = MetricIntegrand::euclidean();
        let u = ScalarField::from_fn(&grid, |_, y| y);
        let reps = cross_certify(
            &m,
            &grid,
            &faces,
            &VectorField::zeros(&grid),
            &[u],
            &Tolerances::for_solver(1e-5, 1.0 / 16.0),
        )
        .unwrap();
        assert!(!reps[0].pass);
    }

    #[test]
    fn sign_condition_enforced_on_jumps() {
        let (grid, faces) = square(16);
        let m = MetricIntegrand::euclidean();
        // u ≡ 1/2 misses both data by 1/2, so every Γ face is checked.
        let u = ScalarField::from_fn(&grid, |_, _| 0.5);
        let r = verify_calibration(&m, &grid, &faces, &u, &up(&grid, &faces), &Tolerances::grid_scale(16.0)).unwrap();
        assert_eq!(r.sign_faces, 32);
        assert!(r.r_sign < 1e-12, "{r:?}");
        let r = verify_calibration(&m, &grid, &faces, &u, &VectorField::zeros(&grid), &Tolerances::grid_scale(16.0))
            .unwrap();
        assert!((r.r_sign - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extension_identity_and_precondition() {
        let (grid, faces) = square(16);
        let m = MetricIntegrand::euclidean();
        let u = ScalarField::from_fn(&grid, |_, y| y);
        let z = up(&grid, &faces);
        let t = Tolerances::grid_scale(16.0);
        let base = verify_calibration(&m, &grid, &faces, &u, &z, &t).unwrap();
        let same = extend_gamma_check(&m, &grid, &faces, &u, &z, |_, y| y < 1e-9 || y > 1.0 - 1e-9, &t).unwrap();
        assert_eq!(base, same);
        let all = extend_gamma_check(&m, &grid, &faces, &u, &z, |_, _| true, &t).unwrap();
        assert!(all.pass);
        assert!((all.r_pair - base.r_pair).abs() <= 1e-10);
        let bad = extend_gamma_check(&m, &grid, &faces, &u, &z, |_, y| y < 0.5, &t);
        assert!(matches!(bad, Err(Error::Precondition(_))));
    }

    #[test]
    fn monotone_in_tolerance() {
        let (grid, faces) = square(16);
        let m = MetricIntegrand::euclidean();
        let u = ScalarField::from_fn(&grid, |_, y| (y * 3.0).sin());
        let r = verify_calibration(&m, &grid, &faces, &u, &up(&grid, &faces), &Tolerances::grid_scale(16.0)).unwrap();
        let loose = Tolerances { r_div: 1e9, r_feas: 1e9, r_pair: 1e9, r_sign: 1e9, ..Tolerances::grid_scale(16.0) };
        assert!(r.passes(&loose));
        let text = r.to_key_value();
        assert!(text.contains("r_pair=") && text.contains("pass="));
    }
}
