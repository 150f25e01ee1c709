//! Cell-centered rasterization of the domain, boundary faces with their
//! Dirichlet/Neumann classification, and grid-resident fields.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Axis direction of a boundary face, seen from its inside cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    East,
    West,
    North,
    South,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::East, Dir::West, Dir::North, Dir::South];

    pub fn normal(self) -> [f64; 2] {
        match self {
            Dir::East => [1.0, 0.0],
            Dir::West => [-1.0, 0.0],
            Dir::North => [0.0, 1.0],
            Dir::South => [0.0, -1.0],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Dir::East => "+x",
            Dir::West => "-x",
            Dir::North => "+y",
            Dir::South => "-y",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceKind {
    /// Dirichlet part Γ.
    Gamma,
    Neumann,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFace {
    /// Index of the inside cell.
    pub cell: usize,
    pub dir: Dir,
    pub normal: [f64; 2],
    pub center: [f64; 2],
    pub length: f64,
    pub kind: FaceKind,
    /// Datum f at the face center; present iff `kind == Gamma`.
    pub f_value: Option<f64>,
}

impl BoundaryFace {
    pub fn is_gamma(&self) -> bool {
        self.kind == FaceKind::Gamma
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl BBox {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Self {
        Self { min, max }
    }
}

/// Uniform grid of square cells; cell `(i, j)` has index `j * nx + i`, rows run
/// from `origin.y` upward.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainGrid {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    /// Lower-left corner of cell (0, 0).
    pub origin: [f64; 2],
    inside: Vec<bool>,
}

impl DomainGrid {
    /// Build a grid from an explicit mask; the inside region must be
    /// nonempty and 4-connected.
    pub fn new(nx: usize, ny: usize, h: f64, origin: [f64; 2], inside: Vec<bool>) -> Result<Self> {
        if inside.len() != nx * ny {
            return Err(Error::DimensionMismatch {
                expected: format!("{} cells", nx * ny),
                found: format!("{} mask entries", inside.len()),
            });
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid spacing {h}")));
        }
        let grid = Self { nx, ny, h, origin, inside };
        grid.check_connected()?;
        Ok(grid)
    }

    fn check_connected(&self) -> Result<()> {
        let Some(start) = self.inside.iter().position(|&b| b) else {
            return Err(Error::Domain("inside region is empty".into()));
        };
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut count = 1;
        while let Some(k) = queue.pop_front() {
            for nb in self.neighbors4(k).into_iter().flatten() {
                if self.inside[nb] && !seen[nb] {
                    seen[nb] = true;
                    count += 1;
                    queue.push_back(nb);
                }
            }
        }
        let total = self.inside_count();
        if count != total {
            return Err(Error::Domain(format!("inside region is disconnected ({count} of {total} cells reachable)")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn is_inside(&self, k: usize) -> bool {
        self.inside[k]
    }

    pub fn inside_mask(&self) -> &[bool] {
        &self.inside
    }

    pub fn inside_count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn center(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.coords(k);
        [self.origin[0] + (i as f64 + 0.5) * self.h, self.origin[1] + (j as f64 + 0.5) * self.h]
    }

    /// Neighbor across a face, if it lies on the grid.
    pub fn neighbor(&self, k: usize, dir: Dir) -> Option<usize> {
        let (i, j) = self.coords(k);
        match dir {
            Dir::East => (i + 1 < self.nx).then(|| k + 1),
            Dir::West => (i > 0).then(|| k - 1),
            Dir::North => (j + 1 < self.ny).then(|| k + self.nx),
            Dir::South => (j > 0).then(|| k - self.nx),
        }
    }

    fn neighbors4(&self, k: usize) -> [Option<usize>; 4] {
        Dir::ALL.map(|d| self.neighbor(k, d))
    }

    /// Inside cell whose four neighbors are all inside.
    pub fn is_interior(&self, k: usize) -> bool {
        self.inside[k] && self.neighbors4(k).iter().all(|nb| nb.is_some_and(|n| self.inside[n]))
    }

    pub fn face_center(&self, k: usize, dir: Dir) -> [f64; 2] {
        let c = self.center(k);
        let n = dir.normal();
        [c[0] + 0.5 * self.h * n[0], c[1] + 0.5 * self.h * n[1]]
    }

    /// Cell indices in row-major order.
    pub fn inside_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| self.inside[k])
    }
}

/// Rasterize a domain on a grid with `n` cells per unit length. The bounding
/// box is snapped outward to multiples of 1/n and padded by one cell, so every
/// inside cell has all four neighbors on the grid.
pub fn rasterize<I, G, F>(
    inside_pred: I,
    gamma_pred: G,
    f_func: F,
    bbox: BBox,
    n: usize,
) -> Result<(DomainGrid, Vec<BoundaryFace>)>
where
    I: Fn(f64, f64) -> bool,
    G: Fn(f64, f64) -> bool,
    F: Fn(f64, f64) -> f64,
{
    if n < 4 {
        return Err(Error::InvalidArgument(format!("resolution n = {n} < 4")));
    }
    if !(bbox.max[0] > bbox.min[0] && bbox.max[1] > bbox.min[1]) {
        return Err(Error::InvalidArgument(format!("degenerate bounding box {bbox:?}")));
    }
    let nf = n as f64;
    let h = 1.0 / nf;
    let lo = [(bbox.min[0] * nf).floor(), (bbox.min[1] * nf).floor()];
    let hi = [(bbox.max[0] * nf).ceil(), (bbox.max[1] * nf).ceil()];
    let nx = (hi[0] - lo[0]) as usize + 2;
    let ny = (hi[1] - lo[1]) as usize + 2;
    let origin = [(lo[0] - 1.0) / nf, (lo[1] - 1.0) / nf];
    let mut grid = DomainGrid { nx, ny, h, origin, inside: vec![false; nx * ny] };
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let k = grid.index(i, j);
            let c = grid.center(k);
            grid.inside[k] = inside_pred(c[0], c[1]);
        }
    }
    grid.check_connected()?;
    let faces = extract_faces(&grid, gamma_pred, f_func);
    Ok((grid, faces))
}

/// Enumerate boundary faces in row-major cell order, E/W/N/S within a cell.
pub fn extract_faces<G, F>(grid: &DomainGrid, gamma_pred: G, f_func: F) -> Vec<BoundaryFace>
where
    G: Fn(f64, f64) -> bool,
    F: Fn(f64, f64) -> f64,
{
    let mut faces = Vec::new();
    for k in grid.inside_cells() {
        for dir in Dir::ALL {
            let outside = grid.neighbor(k, dir).is_none_or(|nb| !grid.is_inside(nb));
            if !outside {
                continue;
            }
            let center = grid.face_center(k, dir);
            let gamma = gamma_pred(center[0], center[1]);
            faces.push(BoundaryFace {
                cell: k,
                dir,
                normal: dir.normal(),
                center,
                length: grid.h,
                kind: if gamma { FaceKind::Gamma } else { FaceKind::Neumann },
                f_value: gamma.then(|| f_func(center[0], center[1])),
            });
        }
    }
    faces
}

/// Per-cell scalar. Entries off the domain are held at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &DomainGrid) -> Self {
        Self { values: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: &DomainGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                if grid.is_inside(k) {
                    let c = grid.center(k);
                    f(c[0], c[1])
                } else {
                    0.0
                }
            })
            .collect();
        Self { values }
    }

    /// Adopt raw values (e.g. from a file): inside cells must be finite,
    /// everything else is reset to 0.
    pub fn from_raw(grid: &DomainGrid, mut values: Vec<f64>) -> Result<Self> {
        check_len(grid, values.len())?;
        for (k, v) in values.iter_mut().enumerate() {
            if grid.is_inside(k) {
                if !v.is_finite() {
                    let (i, j) = grid.coords(k);
                    return Err(Error::InvalidArgument(format!("non-finite value at cell ({i}, {j})")));
                }
            } else {
                *v = 0.0;
            }
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values on inside cells, row-major.
    pub fn inside_values<'a>(&'a self, grid: &'a DomainGrid) -> impl Iterator<Item = f64> + 'a {
        grid.inside_cells().map(|k| self.values[k])
    }
}

/// Per-cell 2-vector. Besides inside cells, an outside cell carries an x (y)
/// component when its east (north) neighbor meets it across a Dirichlet face;
/// that component is the dual variable of the face.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: &DomainGrid) -> Self {
        Self { x: vec![0.0; grid.len()], y: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: &DomainGrid, v: [f64; 2]) -> Self {
        Self { x: vec![v[0]; grid.len()], y: vec![v[1]; grid.len()] }
    }

    pub fn get(&self, k: usize) -> [f64; 2] {
        [self.x[k], self.y[k]]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { x: self.x.iter().map(|v| c * v).collect(), y: self.y.iter().map(|v| c * v).collect() }
    }
}

pub(crate) fn check_len(grid: &DomainGrid, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::ShapeMismatch(format!("field has {len} entries, grid has {}", grid.len())));
    }
    Ok(())
}
