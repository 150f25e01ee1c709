//! Discrete gradient with Dirichlet ghost values, its exact adjoint, and the
//! primal/dual objectives.
//!
//! Every grid cell owns an x slot (the edge to its east neighbor) and a y slot
//! (the edge to its north neighbor). A slot is active when
//!
//! * both cells are inside: `(u_E − u)/h`;
//! * the cell is inside and its east face is Dirichlet: `(f − u)/h`;
//! * the cell is outside and its east neighbor meets it across a Dirichlet
//!   face: `(u_E − f)/h`. These *ghost* slots carry the west/south faces.
//!
//! Neumann faces have no slot (replicate padding), so the operator never
//! reads a normal dual component there. The dual variable z lives on the same
//! slots; on an inside cell both components form one vector under φ, while
//! each ghost component stands alone for its own face.
//!
//! Inner products carry the cell area h² on both sides, so
//! `⟨K u, z⟩ + ⟨u, div z⟩ = 0` holds to rounding for the linear part K.

use crate::anisotropy::{MetricIntegrand, Norm};
use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{BoundaryFace, Dir, DomainGrid, ScalarField, VectorField};

/// Per-slot gradient values, laid out like [`VectorField`].
pub type GradField = VectorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A Dirichlet face and the dual slot that carries its flux.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSlot {
    /// Index into the face list the operator was built from.
    pub face: usize,
    pub slot: usize,
    pub axis: Axis,
    /// +1 when the outward normal points along the axis (east/north faces).
    pub sign: f64,
    pub f: f64,
    /// Inside cell adjacent to the face.
    pub cell: usize,
}

#[derive(Clone, Debug)]
pub struct GradientOperator {
    pub(crate) nx: usize,
    pub(crate) ny: usize,
    pub(crate) h: f64,
    pub(crate) inside: Vec<bool>,
    // g_x[k] = (to_x[k]·u[k+1] − from_x[k]·u[k] + b_x[k]) / h, same for y with k+nx
    pub(crate) from_x: Vec<f64>,
    pub(crate) to_x: Vec<f64>,
    pub(crate) b_x: Vec<f64>,
    pub(crate) from_y: Vec<f64>,
    pub(crate) to_y: Vec<f64>,
    pub(crate) b_y: Vec<f64>,
    pub(crate) active_x: Vec<bool>,
    pub(crate) active_y: Vec<bool>,
    gamma: Vec<GammaSlot>,
    datum_range: (f64, f64),
    pub(crate) parallel: bool,
}

impl GradientOperator {
    /// Build the operator. With `f_on == false`, Dirichlet faces are treated
    /// as Neumann (pure interior total variation).
    pub fn new(grid: &DomainGrid, faces: &[BoundaryFace], f_on: bool) -> Result<Self> {
        let len = grid.len();
        let nx = grid.nx;
        let mut op = Self {
            nx,
            ny: grid.ny,
            h: grid.h,
            inside: grid.inside_mask().to_vec(),
            from_x: vec![0.0; len],
            to_x: vec![0.0; len],
            b_x: vec![0.0; len],
            from_y: vec![0.0; len],
            to_y: vec![0.0; len],
            b_y: vec![0.0; len],
            active_x: vec![false; len],
            active_y: vec![false; len],
            gamma: Vec::new(),
            datum_range: (0.0, 0.0),
            parallel: true,
        };
        for k in grid.inside_cells() {
            if grid.neighbor(k, Dir::East).is_some_and(|e| grid.is_inside(e)) {
                op.from_x[k] = 1.0;
                op.to_x[k] = 1.0;
                op.active_x[k] = true;
            }
            if grid.neighbor(k, Dir::North).is_some_and(|n| grid.is_inside(n)) {
                op.from_y[k] = 1.0;
                op.to_y[k] = 1.0;
                op.active_y[k] = true;
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (idx, face) in faces.iter().enumerate() {
            if !grid.is_inside(face.cell) {
                return Err(Error::ShapeMismatch(format!("face {idx} sits on an outside cell")));
            }
            let Some(f) = face.f_value.filter(|_| face.is_gamma() && f_on) else {
                continue;
            };
            if !f.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite datum on face {idx}")));
            }
            lo = lo.min(f);
            hi = hi.max(f);
            let k = face.cell;
            let (slot, axis, sign) = match face.dir {
                Dir::East => (k, Axis::X, 1.0),
                Dir::North => (k, Axis::Y, 1.0),
                Dir::West => (k - 1, Axis::X, -1.0),
                Dir::South => (k - nx, Axis::Y, -1.0),
            };
            let (from, to, b, active) = match axis {
                Axis::X => (&mut op.from_x, &mut op.to_x, &mut op.b_x, &mut op.active_x),
                Axis::Y => (&mut op.from_y, &mut op.to_y, &mut op.b_y, &mut op.active_y),
            };
            if sign > 0.0 {
                from[slot] = 1.0;
                b[slot] = f;
            } else {
                to[slot] = 1.0;
                b[slot] = -f;
            }
            active[slot] = true;
            op.gamma.push(GammaSlot { face: idx, slot, axis, sign, f, cell: k });
        }
        if lo <= hi {
            op.datum_range = (lo, hi);
        }
        Ok(op)
    }

    /// Run the row kernels on the rayon pool (default) or sequentially.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.inside.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inside.is_empty()
    }

    pub fn gamma_slots(&self) -> &[GammaSlot] {
        &self.gamma
    }

    /// (min f, max f) over Dirichlet faces; (0, 0) without any.
    pub fn datum_range(&self) -> (f64, f64) {
        self.datum_range
    }

    pub fn is_inside(&self, k: usize) -> bool {
        self.inside[k]
    }

    pub fn active_x(&self) -> &[bool] {
        &self.active_x
    }

    pub fn active_y(&self) -> &[bool] {
        &self.active_y
    }

    /// Cells that carry an x (y) component of z on file: inside cells and
    /// active ghost slots.
    pub fn carried(&self, axis: Axis) -> Vec<bool> {
        let active = match axis {
            Axis::X => &self.active_x,
            Axis::Y => &self.active_y,
        };
        self.inside.iter().zip(active).map(|(&i, &a)| i || a).collect()
    }

    /// Weight of the integrand seen by a slot: the cell's own weight when
    /// inside, otherwise that of the inside neighbor across the face.
    #[inline]
    pub(crate) fn slot_weight(&self, m: &MetricIntegrand, k: usize, axis: Axis) -> f64 {
        if self.inside[k] {
            m.weight(k)
        } else {
            match axis {
                Axis::X => m.weight(k + 1),
                Axis::Y => m.weight(k + self.nx),
            }
        }
    }

    /// Zero every component that does not belong to an active slot. The
    /// normal trace on Neumann faces is 0 by definition.
    pub fn canonicalize(&self, z: &mut VectorField) {
        for k in 0..self.len() {
            if !self.active_x[k] || !z.x[k].is_finite() {
                z.x[k] = 0.0;
            }
            if !self.active_y[k] || !z.y[k].is_finite() {
                z.y[k] = 0.0;
            }
        }
    }

    #[inline]
    fn slot_values(&self, u: &[f64], k: usize, i: usize, j: usize, datum: f64) -> [f64; 2] {
        let inv_h = 1.0 / self.h;
        let ue = if i + 1 < self.nx { u[k + 1] } else { 0.0 };
        let un = if j + 1 < self.ny { u[k + self.nx] } else { 0.0 };
        [
            (self.to_x[k] * ue - self.from_x[k] * u[k] + datum * self.b_x[k]) * inv_h,
            (self.to_y[k] * un - self.from_y[k] * u[k] + datum * self.b_y[k]) * inv_h,
        ]
    }

    fn apply_impl(&self, u: &ScalarField, datum: f64) -> Result<GradField> {
        check_len_op(self, u.len())?;
        let mut g = VectorField { x: vec![0.0; self.len()], y: vec![0.0; self.len()] };
        let nx = self.nx;
        exec::for_rows2(&mut g.x, &mut g.y, nx, self.parallel, |j, gx, gy| {
            for i in 0..nx {
                let v = self.slot_values(&u.values, j * nx + i, i, j, datum);
                gx[i] = v[0];
                gy[i] = v[1];
            }
        });
        Ok(g)
    }

    /// g = K u + b: forward differences with Dirichlet ghosts.
    pub fn grad(&self, u: &ScalarField) -> Result<GradField> {
        self.apply_impl(u, 1.0)
    }

    /// The linear part K u (datum set to zero).
    pub fn grad_linear(&self, u: &ScalarField) -> Result<GradField> {
        self.apply_impl(u, 0.0)
    }

    /// div z = −Kᵀz on inside cells (0 elsewhere).
    pub fn div_adjoint(&self, z: &VectorField) -> Result<ScalarField> {
        check_len_op(self, z.x.len())?;
        check_len_op(self, z.y.len())?;
        let mut d = vec![0.0; self.len()];
        let nx = self.nx;
        exec::for_rows(&mut d, nx, self.parallel, |j, row| {
            for (i, out) in row.iter_mut().enumerate() {
                let k = j * nx + i;
                if self.inside[k] {
                    *out = self.div_at(&z.x, &z.y, k);
                }
            }
        });
        Ok(ScalarField { values: d })
    }

    /// Divergence at an inside cell (needs all four neighbors on the grid).
    #[inline]
    pub(crate) fn div_at(&self, zx: &[f64], zy: &[f64], k: usize) -> f64 {
        let w = k - 1;
        let s = k - self.nx;
        (self.from_x[k] * zx[k] - self.to_x[w] * zx[w] + self.from_y[k] * zy[k] - self.to_y[s] * zy[s]) / self.h
    }

    /// Weighted inner product Σ h² u·v over inside cells.
    pub fn inner_cells(&self, u: &ScalarField, v: &ScalarField) -> f64 {
        let h2 = self.h * self.h;
        exec::ordered_sum(self.ny, self.parallel, |j| {
            let mut s = 0.0;
            for k in j * self.nx..(j + 1) * self.nx {
                if self.inside[k] {
                    s += u.values[k] * v.values[k];
                }
            }
            s * h2
        })
    }

    /// Weighted inner product Σ h² g·z over all slots.
    pub fn inner_slots(&self, g: &VectorField, z: &VectorField) -> f64 {
        let h2 = self.h * self.h;
        exec::ordered_sum(self.ny, self.parallel, |j| {
            let mut s = 0.0;
            for k in j * self.nx..(j + 1) * self.nx {
                if self.active_x[k] {
                    s += g.x[k] * z.x[k];
                }
                if self.active_y[k] {
                    s += g.y[k] * z.y[k];
                }
            }
            s * h2
        })
    }

    /// Row sum of h²·φ over the slots of row `j`, given slot values `g`.
    pub(crate) fn phi_row(&self, m: &MetricIntegrand, norm: Norm, gx: &[f64], gy: &[f64], j: usize) -> f64 {
        let mut s = 0.0;
        for k in j * self.nx..(j + 1) * self.nx {
            s += self.phi_cell(m, norm, gx[k], gy[k], k);
        }
        s * self.h * self.h
    }

    /// φ summed over the slots owned by cell `k` (without the h² factor).
    #[inline]
    pub(crate) fn phi_cell(&self, m: &MetricIntegrand, norm: Norm, gx: f64, gy: f64, k: usize) -> f64 {
        if self.inside[k] {
            MetricIntegrand::phi_with(norm, m.weight(k), [gx, gy])
        } else {
            let mut s = 0.0;
            if self.active_x[k] {
                s += MetricIntegrand::phi_with(norm, self.slot_weight(m, k, Axis::X), [gx, 0.0]);
            }
            if self.active_y[k] {
                s += MetricIntegrand::phi_with(norm, self.slot_weight(m, k, Axis::Y), [0.0, gy]);
            }
            s
        }
    }

    /// Largest φ⁰ over the slots owned by cell `k`.
    #[inline]
    pub(crate) fn polar_cell(&self, m: &MetricIntegrand, norm: Norm, zx: f64, zy: f64, k: usize) -> f64 {
        if self.inside[k] {
            MetricIntegrand::polar_with(norm, m.weight(k), [zx, zy])
        } else {
            let mut p: f64 = 0.0;
            if self.active_x[k] {
                p = p.max(MetricIntegrand::polar_with(norm, self.slot_weight(m, k, Axis::X), [zx, 0.0]));
            }
            if self.active_y[k] {
                p = p.max(MetricIntegrand::polar_with(norm, self.slot_weight(m, k, Axis::Y), [0.0, zy]));
            }
            p
        }
    }

    /// Project the slots of cell `k` onto the polar unit ball.
    #[inline]
    pub(crate) fn project_cell(&self, m: &MetricIntegrand, norm: Norm, z: [f64; 2], k: usize) -> [f64; 2] {
        if self.inside[k] {
            norm.project_dual_ball(z, m.weight(k))
        } else {
            let x = if self.active_x[k] {
                norm.project_dual_ball([z[0], 0.0], self.slot_weight(m, k, Axis::X))[0]
            } else {
                0.0
            };
            let y = if self.active_y[k] {
                norm.project_dual_ball([0.0, z[1]], self.slot_weight(m, k, Axis::Y))[1]
            } else {
                0.0
            };
            [x, y]
        }
    }

    /// Outward flux [z, ν] through the Dirichlet face carried by `gs`.
    #[inline]
    pub fn normal_trace(&self, z: &VectorField, gs: &GammaSlot) -> f64 {
        gs.sign
            * match gs.axis {
                Axis::X => z.x[gs.slot],
                Axis::Y => z.y[gs.slot],
            }
    }
}

fn check_len_op(op: &GradientOperator, len: usize) -> Result<()> {
    if len != op.len() {
        return Err(Error::ShapeMismatch(format!("field has {len} entries, operator has {}", op.len())));
    }
    Ok(())
}

/// Relaxed primal objective Σ h² φ(x, K u + b), interior variation plus the
/// Dirichlet penalty, summed row by row.
pub fn primal_objective(m: &MetricIntegrand, op: &GradientOperator, u: &ScalarField) -> Result<f64> {
    let g = op.grad(u)?;
    Ok(primal_from_grad(m, op, &g))
}

pub(crate) fn primal_from_grad(m: &MetricIntegrand, op: &GradientOperator, g: &GradField) -> f64 {
    let norm = m.norm();
    exec::ordered_sum(op.ny, op.parallel, |j| op.phi_row(m, norm, &g.x, &g.y, j))
}

/// Dual objective Σ over Dirichlet faces of h·f·[z, ν]. No feasibility check.
pub fn dual_objective(op: &GradientOperator, z: &VectorField) -> Result<f64> {
    check_len_op(op, z.x.len())?;
    check_len_op(op, z.y.len())?;
    Ok(op.gamma.iter().fold(0.0, |acc, gs| acc + op.h * gs.f * op.normal_trace(z, gs)))
}

/// Lower bound on the primal optimum valid for any z with φ⁰(x, z) ≤ 1.
///
/// Minimizers can be truncated to the datum range [f_min, f_max] without
/// increasing the objective, so the dual of the box-constrained problem
/// applies: D(z) − Σ h² max(f_min·div z, f_max·div z). It equals
/// [`dual_objective`] when div z = 0.
pub fn dual_lower_bound(op: &GradientOperator, z: &VectorField) -> Result<f64> {
    let d = op.div_adjoint(z)?;
    Ok(dual_lower_bound_with_div(op, z, &d.values))
}

pub(crate) fn dual_lower_bound_with_div(op: &GradientOperator, z: &VectorField, div: &[f64]) -> f64 {
    let (lo, hi) = op.datum_range;
    let h2 = op.h * op.h;
    let penalty = exec::ordered_sum(op.ny, op.parallel, |j| {
        let mut s = 0.0;
        for k in j * op.nx..(j + 1) * op.nx {
            if op.inside[k] {
                s += (lo * div[k]).max(hi * div[k]);
            }
        }
        s * h2
    });
    let d = op.gamma.iter().fold(0.0, |acc, gs| acc + op.h * gs.f * op.normal_trace(z, gs));
    d - penalty
}

/// Cellwise pairing densities (z·g, φ(x, g)) with g = K u + b; ghost slots are
/// booked on their (outside) cell.
pub fn pairing_density(
    m: &MetricIntegrand,
    op: &GradientOperator,
    u: &ScalarField,
    z: &VectorField,
) -> Result<(ScalarField, ScalarField)> {
    let g = op.grad(u)?;
    check_len_op(op, z.x.len())?;
    let norm = m.norm();
    let mut pair = vec![0.0; op.len()];
    let mut phi = vec![0.0; op.len()];
    for k in 0..op.len() {
        let gx = if op.active_x[k] { g.x[k] } else { 0.0 };
        let gy = if op.active_y[k] { g.y[k] } else { 0.0 };
        pair[k] = z.x[k] * gx + z.y[k] * gy;
        phi[k] = op.phi_cell(m, norm, gx, gy, k);
    }
    Ok((ScalarField { values: pair }, ScalarField { values: phi }))
}

/// √8 / h: bound on ‖K‖ for forward differences (each slot reads two cells,
/// each cell feeds at most four slots).
pub fn op_norm_bound(grid: &DomainGrid) -> f64 {
    8f64.sqrt() / grid.h
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

    #[test]
    fn constant_matching_datum_has_zero_gradient() {
        let (grid, faces) = rasterize(
            |x, y| x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0,
            |_, y| y < 1e-9 || y > 1.0 - 1e-9,
            |_, _| 0.7,
            BBox::new([0.0, 0.0], [1.0, 1.0]),
            8,
        )
        .unwrap();
        let op = GradientOperator::new(&grid, &faces, true).unwrap();
        let g = op.grad(&ScalarField::from_fn(&grid, |_, _| 0.7)).unwrap();
        assert!(g.x.iter().chain(&g.y).all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn linear_profile_ghost_convention() {
        // hand evaluation with u = y at cell centers, ghost at distance h
        let n = 10;
        let (grid, faces) = square(n);
        let op = GradientOperator::new(&grid, &faces, true).unwrap();
        let u = ScalarField::from_fn(&grid, |_, y| y);
        let g = op.grad(&u).unwrap();
        let h = grid.h;
        for k in grid.inside_cells() {
            let (_, j) = grid.coords(k);
            assert!(g.x[k].abs() < 1e-12);
            let expected = if j == n { (1.0 - (1.0 - 0.5 * h)) / h } else { 1.0 };
            assert!((g.y[k] - expected).abs() < 1e-9, "row {j}: {}", g.y[k]);
        }
        // bottom ghost slots: (u_bottom − 0)/h = 1/2
        for gs in op.gamma_slots().iter().filter(|gs| gs.sign < 0.0) {
            assert!((g.y[gs.slot] - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn neumann_only_gradient() {
        let n = 10;
        let (grid, faces) = square(n);
        let op = GradientOperator::new(&grid, &faces, false).unwrap();
        let g = op.grad(&ScalarField::from_fn(&grid, |_, y| y)).unwrap();
        for k in 0..grid.len() {
            let (_, j) = grid.coords(k);
            let expected = if grid.is_inside(k) && j < n { 1.0 } else { 0.0 };
            assert!((g.y[k] - expected).abs() < 1e-9);
            assert!(g.x[k].abs() < 1e-12);
        }
        assert!(op.gamma_slots().is_empty());
    }

    #[test]
    fn square_objectives() {
        let m = MetricIntegrand::euclidean();
        for n in [4, 10, 64] {
            let (grid, faces) = square(n);
            let op = GradientOperator::new(&grid, &faces, true).unwrap();
            let p = primal_objective(&m, &op, &ScalarField::from_fn(&grid, |_, y| y)).unwrap();
            assert!((p - 1.0).abs() < 1e-12, "n={n}: {p}");
            let p0 = primal_objective(&m, &op, &ScalarField::zeros(&grid)).unwrap();
            assert!((p0 - 1.0).abs() < 1e-12);
            let z = VectorField::constant(&grid, [0.0, 1.0]);
            assert!((dual_objective(&op, &z).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(dual_objective(&op, &VectorField::zeros(&grid)).unwrap(), 0.0);
        }
    }

    #[test]
    fn pairing_densities() {
        let m = MetricIntegrand::euclidean();
        let (grid, faces) = square(16);
        let op = GradientOperator::new(&grid, &faces, true).unwrap();
        let u = ScalarField::from_fn(&grid, |_, y| y);
        let (pair, phi) = pairing_density(&m, &op, &u, &VectorField::constant(&grid, [0.0, 1.0])).unwrap();
        for k in grid.inside_cells() {
            assert!((pair.values[k] - phi.values[k]).abs() < 1e-12);
        }
        let interior: Vec<_> = (0..grid.len()).filter(|&k| grid.is_interior(k)).collect();
        assert!(interior.iter().all(|&k| (pair.values[k] - 1.0).abs() < 1e-9));
        let (pair, phi) = pairing_density(&m, &op, &u, &VectorField::constant(&grid, [0.0, -1.0])).unwrap();
        assert!(interior.iter().all(|&k| (pair.values[k] + 1.0).abs() < 1e-9 && (phi.values[k] - 1.0).abs() < 1e-9));
        let c = ScalarField::from_fn(&grid, |_, _| 0.0);
        let flat = rasterize(
            |x, y| x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0,
            |_, _| true,
            |_, _| 0.0,
            BBox::new([0.0, 0.0], [1.0, 1.0]),
            16,
        )
        .unwrap();
        let op0 = GradientOperator::new(&flat.0, &flat.1, true).unwrap();
        let (pair, phi) = pairing_density(&m, &op0, &c, &VectorField::constant(&grid, [0.3, 0.4])).unwrap();
        assert!(pair.values.iter().chain(&phi.values).all(|v| *v == 0.0));
    }

    #[test]
    fn divergence_of_vertical_field() {
        let (grid, faces) = square(8);
        let op = GradientOperator::new(&grid, &faces, true).unwrap();
        let d = op.div_adjoint(&VectorField::constant(&grid, [0.0, 1.0])).unwrap();
        // telescoping: every column sums to zero, interior rows vanish
        for k in grid.inside_cells() {
            assert!(d.values[k].abs() < 1e-12);
        }
        let d = op.div_adjoint(&VectorField::zeros(&grid)).unwrap();
        assert!(d.values.iter().all(|v| *v == 0.0));
        // with no ghost slot at the bottom the bottom row would carry the trace
        let op_n = GradientOperator::new(&grid, &faces, false).unwrap();
        let d = op_n.div_adjoint(&VectorField::constant(&grid, [0.0, 1.0])).unwrap();
        for k in grid.inside_cells() {
            let (_, j) = grid.coords(k);
            let expected = match j {
                1 => 8.0,
                8 => -8.0,
                _ => 0.0,
            };
            assert!((d.values[k] - expected).abs() < 1e-9, "row {j}: {}", d.values[k]);
        }
    }

    #[test]
    fn translation_invariance() {
        let m = MetricIntegrand::euclidean();
        let c = 2.5;
        let mk = |shift: f64| {
            rasterize(
                |x, y| x * x + y * y < 1.0,
                |_, y| y < 0.0,
                move |x, _| x + shift,
                BBox::new([-1.0, -1.0], [1.0, 1.0]),
                16,
            )
            .unwrap()
        };
        let (g0, f0) = mk(0.0);
        let (g1, f1) = mk(c);
        let u0 = ScalarField::from_fn(&g0, |x, y| x * y);
        let u1 = ScalarField::from_fn(&g1, |x, y| x * y + c);
        let p0 = primal_objective(&m, &GradientOperator::new(&g0, &f0, true).unwrap(), &u0).unwrap();
        let p1 = primal_objective(&m, &GradientOperator::new(&g1, &f1, true).unwrap(), &u1).unwrap();
        assert!((p0 - p1).abs() < 1e-12 * p0.max(1.0));
    }

    #[test]
    fn shape_mismatch() {
        let (grid, faces) = square(8);
        let op = GradientOperator::new(&grid, &faces, true).unwrap();
        assert!(op.grad(&ScalarField { values: vec![0.0; 3] }).is_err());
        assert!(op.div_adjoint(&VectorField { x: vec![0.0; 3], y: vec![0.0; 3] }).is_err());
    }

    #[test]
    fn norm_bound_values() {
        let (grid, _) = square(4);
        assert!((op_norm_bound(&grid) - 4.0 * 8f64.sqrt()).abs() < 1e-12);
    }
}
