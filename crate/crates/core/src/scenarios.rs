//! Built-in worked examples: domain, Dirichlet part Γ, datum, closed-form
//! minimizers and calibration fields, and a chord test for the barrier
//! condition.
//!
//! Every calibration field is divergence free and is written as
//! z = (∂ψ/∂y, −∂ψ/∂x) for a stream function ψ. On a grid the slot fluxes are
//! differences of ψ at cell corners, which makes the discrete divergence
//! vanish identically.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};
use std::fmt;

use crate::anisotropy::{MetricIntegrand, Vec2};
use crate::error::{Error, Result};
use crate::grid::{rasterize, BBox, BoundaryFace, DomainGrid, ScalarField, VectorField};
use crate::operators::GradientOperator;

const SQRT_3: f64 = 1.732_050_807_568_877_2;
/// Height of the notch bumps.
const BUMP: f64 = 0.5 / SQRT_3;
const EDGE_TOL: f64 = 1e-9;
const BISECTION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    SquareUpdown,
    BmDisk,
    DiskArc,
    Notch,
    Fan3,
}

/// An objective value together with where it comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Optimum {
    pub value: f64,
    pub provenance: &'static str,
}

/// Increasing profile g on [0, 1] with g(0) = 0 and g(1) = 1.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Linear,
    /// 0 below `at`, 1 from `at` on.
    Step {
        at: f64,
    },
    /// Piecewise linear through equally spaced nodes.
    Table(Vec<f64>),
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Linear => Ok(()),
            Profile::Step { at } => {
                if *at > 0.0 && *at <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("step position {at} outside (0, 1]")))
                }
            }
            Profile::Table(v) => {
                if v.len() < 2 || v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter("profile table needs at least two finite nodes".into()));
                }
                if v[0] != 0.0 || v[v.len() - 1] != 1.0 {
                    return Err(Error::InvalidParameter("profile must start at 0 and end at 1".into()));
                }
                if v.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidParameter("profile must be nondecreasing".into()));
                }
                Ok(())
            }
        }
    }

    /// g(s) for s clamped to [0, 1].
    pub fn eval(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        match self {
            Profile::Linear => s,
            Profile::Step { at } => {
                if s < *at {
                    0.0
                } else {
                    1.0
                }
            }
            Profile::Table(v) => {
                let m = (v.len() - 1) as f64;
                let p = s * m;
                let i = (p.floor() as usize).min(v.len() - 2);
                let w = p - i as f64;
                v[i] * (1.0 - w) + v[i + 1] * w
            }
        }
    }
}

/// Selects one member of a scenario's solution family.
#[derive(Clone, Debug, PartialEq)]
pub enum Member {
    /// The scenario's representative solution.
    Default,
    /// Value λ ∈ [0, 1] on the middle band (`bm_disk`).
    Lambda(f64),
    /// Increasing profile (`square_updown`, `fan3`).
    Profile(Profile),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Which {
    U(Member),
    Z,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Scalar(Vec<f64>),
    Vector(Vec<Vec2>),
}

/// Boundary piece, traversed counterclockwise around the domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Piece {
    Segment { a: Vec2, b: Vec2 },
    Arc { center: Vec2, radius: f64, from: f64, to: f64 },
}

impl Piece {
    pub fn length(&self) -> f64 {
        match *self {
            Piece::Segment { a, b } => (b[0] - a[0]).hypot(b[1] - a[1]),
            Piece::Arc { radius, from, to, .. } => radius * (to - from),
        }
    }

    fn at(&self, s: f64) -> Vec2 {
        match *self {
            Piece::Segment { a, b } => {
                let w = s / self.length();
                [a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])]
            }
            Piece::Arc { center, radius, from, .. } => {
                let th = from + s / radius;
                [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            }
        }
    }
}

/// Result of the chord test at one sample of Γ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierSample {
    /// Arc-length position on the boundary curve.
    pub s: f64,
    pub point: Vec2,
    /// The chord midpoint lies strictly inside Ω.
    pub pass: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct Scenario {
    pub id: ScenarioId,
    pub name: &'static str,
    /// One-line description for listings.
    pub summary: &'static str,
    pub notes: &'static [&'static str],
}

pub const NAMES: [&str; 5] = ["square_updown", "bm_disk", "disk_arc", "notch", "fan3"];

const ALL: [Scenario; 5] = [
    Scenario {
        id: ScenarioId::SquareUpdown,
        name: "square_updown",
        summary: "unit square, f = 0 on the bottom and 1 on the top; every increasing u(y) is optimal",
        notes: &[
            "non-unique: any increasing u(y) with u(0) = 0, u(1) = 1",
            "Γ disconnected; interior discontinuities allowed",
            "flat Γ: the barrier condition fails",
        ],
    },
    Scenario {
        id: ScenarioId::BmDisk,
        name: "bm_disk",
        summary: "unit disk, f = 0 below y = -1/√2 and 1 above y = 1/√2; family u_λ",
        notes: &[
            "non-unique: u_λ for every λ in [0, 1], all discontinuous along two chords",
            "Γ disconnected; strictly convex domain",
        ],
    },
    Scenario {
        id: ScenarioId::DiskArc,
        name: "disk_arc",
        summary: "unit disk, Γ the lower half circle, f = x; fans of segments from (±1, 0)",
        notes: &["Γ connected, f smooth; u continuous in Ω ∪ Γ", "discontinuous only at the endpoints (±1, 0) of Γ"],
    },
    Scenario {
        id: ScenarioId::Notch,
        name: "notch",
        summary: "lower half disk with two triangular bumps, Γ the lower half circle, f = x",
        notes: &[
            "discontinuities at (±1, 0) and at the notch (0, 0) in the Neumann part",
            "barrier condition holds near Γ",
        ],
    },
    Scenario {
        id: ScenarioId::Fan3,
        name: "fan3",
        summary: "quarter disk of radius 2 with two circular caps, f = 1 (x < 0) / 0 (x > 0)",
        notes: &[
            "non-unique: u = g(θ) for every increasing profile g",
            "strictly convex, Γ an arc through the origin where f jumps",
        ],
    },
];

pub fn all() -> &'static [Scenario] {
    &ALL
}

/// Look a scenario up by name.
pub fn get_scenario(name: &str) -> Result<Scenario> {
    ALL.iter().find(|s| s.name == name).copied().ok_or_else(|| Error::Lookup {
        name: name.to_string(),
        available: NAMES.iter().map(|s| s.to_string()).collect(),
    })
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

fn in_unit_disk(x: f64, y: f64) -> bool {
    x * x + y * y < 1.0
}

fn notch_inside(x: f64, y: f64) -> bool {
    (y < 0.0 && in_unit_disk(x, y))
        || (-1.0 < x && x < 0.0 && 0.0 <= y && y < BUMP - (x + 0.5).abs() / SQRT_3)
        || (0.0 < x && x < 1.0 && 0.0 <= y && y < BUMP - (x - 0.5).abs() / SQRT_3)
}

fn fan3_inside(x: f64, y: f64) -> bool {
    (x > 0.0 && y > 0.0 && x * x + y * y < 4.0)
        || (x <= 0.0 && (x - 2.0).powi(2) + (y - 1.0).powi(2) < 5.0)
        || (y <= 0.0 && (x - 1.0).powi(2) + (y - 2.0).powi(2) < 5.0)
}

fn dist(p: Vec2, x: f64, y: f64) -> f64 {
    (x - p[0]).hypot(y - p[1])
}

/// Value t of the segment from `center` to (t, −√(1 − t²)) passing through
/// (x, y), found by bisection on `[lo, hi]`.
pub fn fan_level(center: Vec2, lo: f64, hi: f64, x: f64, y: f64) -> f64 {
    let cross = |t: f64| {
        let q = [t - center[0], -(1.0 - t * t).max(0.0).sqrt() - center[1]];
        q[0] * (y - center[1]) - q[1] * (x - center[0])
    };
    // One end of the bracket may be the center itself, where the cross
    // product vanishes; orient the search from the other end.
    let at_center = |t: f64| (t - center[0]).abs() < 1e-15 && center[1] == 0.0;
    let (mut near, mut far) = if at_center(lo) { (hi, lo) } else { (lo, hi) };
    let f_near = cross(near);
    if f_near == 0.0 {
        return near;
    }
    let s_near = f_near.signum();
    while (far - near).abs() > BISECTION_TOL {
        let m = 0.5 * (near + far);
        let fm = cross(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == s_near {
            near = m;
        } else {
            far = m;
        }
    }
    let (a, b) = (near, far);
    0.5 * (a + b)
}

/// Unit normal-rotated field of the cone ψ = −|X − c|.
fn cone_z(c: Vec2, x: f64, y: f64) -> Vec2 {
    let r = dist(c, x, y);
    if r == 0.0 {
        return [0.0, 0.0];
    }
    [-(y - c[1]) / r, (x - c[0]) / r]
}

impl Scenario {
    pub fn anisotropy(&self) -> MetricIntegrand {
        MetricIntegrand::euclidean()
    }

    pub fn bbox(&self) -> BBox {
        match self.id {
            ScenarioId::SquareUpdown => BBox::new([0.0, 0.0], [1.0, 1.0]),
            ScenarioId::BmDisk | ScenarioId::DiskArc => BBox::new([-1.0, -1.0], [1.0, 1.0]),
            ScenarioId::Notch => BBox::new([-1.0, -1.0], [1.0, BUMP]),
            ScenarioId::Fan3 => {
                let lo = 2.0 - 5f64.sqrt();
                BBox::new([lo, lo], [2.0, 2.0])
            }
        }
    }

    pub fn inside(&self, x: f64, y: f64) -> bool {
        match self.id {
            ScenarioId::SquareUpdown => 0.0 < x && x < 1.0 && 0.0 < y && y < 1.0,
            ScenarioId::BmDisk | ScenarioId::DiskArc => in_unit_disk(x, y),
            ScenarioId::Notch => notch_inside(x, y),
            ScenarioId::Fan3 => fan3_inside(x, y),
        }
    }

    /// Γ-predicate, applied to boundary points (and face centers).
    pub fn gamma(&self, x: f64, y: f64) -> bool {
        match self.id {
            ScenarioId::SquareUpdown => y < EDGE_TOL || y > 1.0 - EDGE_TOL,
            ScenarioId::BmDisk => y.abs() > FRAC_1_SQRT_2,
            ScenarioId::DiskArc | ScenarioId::Notch => y < 0.0,
            ScenarioId::Fan3 => !(x > 0.0 && y > 0.0),
        }
    }

    pub fn datum(&self, x: f64, y: f64) -> f64 {
        match self.id {
            ScenarioId::SquareUpdown => {
                if y > 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            ScenarioId::BmDisk => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ScenarioId::DiskArc | ScenarioId::Notch => x,
            // On Γ, y > x exactly when x < 0; the form also decides face
            // centers lying on x = 0 next to the origin.
            ScenarioId::Fan3 => {
                if y > x {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn optimum(&self) -> Optimum {
        match self.id {
            ScenarioId::SquareUpdown => Optimum { value: 1.0, provenance: "unit jump across the unit square" },
            ScenarioId::BmDisk => Optimum { value: SQRT_2, provenance: "chord lengths λ√2 + (1 − λ)√2" },
            ScenarioId::DiskArc => Optimum {
                value: 4.0 * SQRT_2 / 3.0,
                provenance: "coarea: 2∫₀¹ |l_t| dt with |l_t| = √(2 − 2t)",
            },
            ScenarioId::Notch => Optimum {
                value: 5.0 / 3.0,
                provenance: "coarea: two outer fans 1/3 each plus unit segments for |t| < 1/2",
            },
            ScenarioId::Fan3 => Optimum { value: 2.0, provenance: "∫₀² dr ∫ g′ dθ over radii of length 2" },
        }
    }

    /// Points where the solution may be discontinuous at the boundary
    /// (endpoints of Γ, corners, the notch).
    pub fn flagged_points(&self) -> Vec<Vec2> {
        match self.id {
            ScenarioId::SquareUpdown => vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            ScenarioId::BmDisk => {
                let a = FRAC_1_SQRT_2;
                vec![[-a, -a], [a, -a], [-a, a], [a, a]]
            }
            ScenarioId::DiskArc => vec![[-1.0, 0.0], [1.0, 0.0]],
            ScenarioId::Notch => vec![[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
            ScenarioId::Fan3 => vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]],
        }
    }

    /// Γ is connected and f continuous on it.
    pub fn continuous_setting(&self) -> bool {
        matches!(self.id, ScenarioId::DiskArc | ScenarioId::Notch)
    }

    /// Members that [`Member::Default`] stands for in listings and tests.
    pub fn default_member(&self) -> Member {
        match self.id {
            ScenarioId::SquareUpdown | ScenarioId::Fan3 => Member::Profile(Profile::Linear),
            ScenarioId::BmDisk => Member::Lambda(0.5),
            ScenarioId::DiskArc | ScenarioId::Notch => Member::Default,
        }
    }

    /// Rasterize at `n` cells per unit length.
    pub fn rasterize(&self, n: usize) -> Result<(DomainGrid, Vec<BoundaryFace>)> {
        let s = *self;
        rasterize(move |x, y| s.inside(x, y), move |x, y| s.gamma(x, y), move |x, y| s.datum(x, y), self.bbox(), n)
    }

    /// Grid, faces and the gradient operator with the datum switched on.
    pub fn discretize(&self, n: usize) -> Result<(DomainGrid, Vec<BoundaryFace>, GradientOperator)> {
        let (grid, faces) = self.rasterize(n)?;
        let op = GradientOperator::new(&grid, &faces, true)?;
        Ok((grid, faces, op))
    }

    fn resolve(&self, member: &Member) -> Result<Member> {
        let m = if *member == Member::Default { self.default_member() } else { member.clone() };
        match (&m, self.id) {
            (Member::Default, ScenarioId::DiskArc | ScenarioId::Notch) => Ok(m),
            (Member::Lambda(l), ScenarioId::BmDisk) => {
                if (0.0..=1.0).contains(l) {
                    Ok(m)
                } else {
                    Err(Error::InvalidParameter(format!("λ = {l} outside [0, 1]")))
                }
            }
            (Member::Profile(p), ScenarioId::SquareUpdown | ScenarioId::Fan3) => {
                p.validate()?;
                Ok(m)
            }
            _ => Err(Error::InvalidParameter(format!("{member:?} is not a member of the {} family", self.name))),
        }
    }

    /// Closed-form solution at one point. Off the domain the formula is
    /// extended by the same expressions.
    pub fn eval_u(&self, member: &Member, x: f64, y: f64) -> Result<f64> {
        let m = self.resolve(member)?;
        Ok(self.u_resolved(&m, x, y))
    }

    fn u_resolved(&self, m: &Member, x: f64, y: f64) -> f64 {
        match (self.id, m) {
            (ScenarioId::SquareUpdown, Member::Profile(g)) => g.eval(y),
            (ScenarioId::BmDisk, Member::Lambda(l)) => {
                if y < -FRAC_1_SQRT_2 {
                    0.0
                } else if y > FRAC_1_SQRT_2 {
                    1.0
                } else {
                    *l
                }
            }
            (ScenarioId::DiskArc, _) => {
                if y <= x.abs() - 1.0 && y < 1.0 - x.abs() {
                    if x > 0.0 {
                        fan_level([1.0, 0.0], 0.0, 1.0, x, y)
                    } else {
                        fan_level([-1.0, 0.0], -1.0, 0.0, x, y)
                    }
                } else {
                    0.0
                }
            }
            (ScenarioId::Notch, _) => {
                if y < SQRT_3 * (x - 1.0) {
                    fan_level([1.0, 0.0], 0.5, 1.0, x, y)
                } else if y < -SQRT_3 * (x + 1.0) {
                    fan_level([-1.0, 0.0], -1.0, -0.5, x, y)
                } else if y < -SQRT_3 * x.abs() {
                    x / x.hypot(y)
                } else if x > 0.0 {
                    0.5
                } else {
                    -0.5
                }
            }
            (ScenarioId::Fan3, Member::Profile(g)) => {
                let th = y.atan2(x);
                if th < 0.0 {
                    0.0
                } else if th > FRAC_PI_2 {
                    1.0
                } else {
                    g.eval(th / FRAC_PI_2)
                }
            }
            _ => unreachable!("member resolved against the scenario"),
        }
    }

    /// Stream function of the calibration field.
    pub fn stream(&self, x: f64, y: f64) -> f64 {
        match self.id {
            ScenarioId::SquareUpdown => -x,
            ScenarioId::BmDisk => -x.clamp(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            ScenarioId::DiskArc => {
                let ax = x.abs();
                if y >= 1.0 - ax {
                    0.0
                } else if y <= ax - 1.0 {
                    -dist(if x > 0.0 { [1.0, 0.0] } else { [-1.0, 0.0] }, x, y)
                } else if x < 0.0 {
                    (y - x - 1.0) / SQRT_2
                } else {
                    (x + y - 1.0) / SQRT_2
                }
            }
            ScenarioId::Notch => {
                if y < SQRT_3 * (x - 1.0) {
                    -dist([1.0, 0.0], x, y)
                } else if y < -SQRT_3 * (x + 1.0) {
                    -dist([-1.0, 0.0], x, y)
                } else if y < -SQRT_3 * x.abs() {
                    -x.hypot(y)
                } else if x > 0.0 {
                    if x < 0.5 {
                        (SQRT_3 * y - x) / 2.0
                    } else {
                        (SQRT_3 * y + x) / 2.0 - 0.5
                    }
                } else if x > -0.5 {
                    (SQRT_3 * y + x) / 2.0
                } else {
                    (SQRT_3 * y - x) / 2.0 - 0.5
                }
            }
            ScenarioId::Fan3 => {
                let th = y.atan2(x);
                if th < 0.0 {
                    -x
                } else if th > FRAC_PI_2 {
                    -y
                } else {
                    -x.hypot(y)
                }
            }
        }
    }

    /// Closed-form calibration field at one point.
    pub fn eval_z(&self, x: f64, y: f64) -> Vec2 {
        let s2 = FRAC_1_SQRT_2;
        match self.id {
            ScenarioId::SquareUpdown => [0.0, 1.0],
            ScenarioId::BmDisk => {
                if x.abs() < FRAC_1_SQRT_2 {
                    [0.0, 1.0]
                } else {
                    [0.0, 0.0]
                }
            }
            ScenarioId::DiskArc => {
                let ax = x.abs();
                if y > 1.0 - ax {
                    [0.0, 0.0]
                } else if y < ax - 1.0 {
                    cone_z(if x > 0.0 { [1.0, 0.0] } else { [-1.0, 0.0] }, x, y)
                } else if x < 0.0 {
                    [s2, s2]
                } else {
                    [s2, -s2]
                }
            }
            ScenarioId::Notch => {
                if y < SQRT_3 * (x - 1.0) {
                    cone_z([1.0, 0.0], x, y)
                } else if y < -SQRT_3 * (x + 1.0) {
                    cone_z([-1.0, 0.0], x, y)
                } else if y < -SQRT_3 * x.abs() {
                    cone_z([0.0, 0.0], x, y)
                } else if (0.0 < x && x < 0.5) || x < -0.5 {
                    [SQRT_3 / 2.0, 0.5]
                } else {
                    [SQRT_3 / 2.0, -0.5]
                }
            }
            ScenarioId::Fan3 => {
                let th = y.atan2(x);
                if th < 0.0 {
                    [0.0, 1.0]
                } else if th > FRAC_PI_2 {
                    [-1.0, 0.0]
                } else {
                    [-th.sin(), th.cos()]
                }
            }
        }
    }

    /// Evaluate a closed form at a list of points.
    pub fn eval_analytic(&self, which: &Which, points: &[Vec2]) -> Result<Values> {
        match which {
            Which::U(member) => {
                let m = self.resolve(member)?;
                Ok(Values::Scalar(points.iter().map(|p| self.u_resolved(&m, p[0], p[1])).collect()))
            }
            Which::Z => Ok(Values::Vector(points.iter().map(|p| self.eval_z(p[0], p[1])).collect())),
        }
    }

    /// Closed-form solution sampled at inside cell centers.
    pub fn analytic_u_field(&self, grid: &DomainGrid, member: &Member) -> Result<ScalarField> {
        let m = self.resolve(member)?;
        Ok(ScalarField::from_fn(grid, |x, y| self.u_resolved(&m, x, y)))
    }

    /// Fans whose staggered flux pairs overshoot the unit ball near their
    /// centers; their stream function is reparametrized on the grid.
    fn regularized_stream(&self) -> bool {
        matches!(self.id, ScenarioId::DiskArc | ScenarioId::Notch)
    }

    /// The calibration field on the slots of `op`, built from corner values
    /// of the stream function. The discrete divergence is zero up to
    /// rounding, and every slot lies in the polar unit ball.
    ///
    /// Where fans are present, ψ is replaced by F(ψ) with
    /// F′(ψ) = |ψ| / (|ψ| + h/2). Level lines of ψ are kept, so the field
    /// stays divergence free, and it shrinks near the fan centers (where
    /// ψ → 0) enough to absorb the O(h/r) overshoot of the staggered pairs.
    pub fn analytic_z_field(&self, grid: &DomainGrid, op: &GradientOperator) -> Result<VectorField> {
        if op.len() != grid.len() {
            return Err(Error::ShapeMismatch("operator and grid disagree".into()));
        }
        let (nx, ny, h) = (grid.nx, grid.ny, grid.h);
        let c = 0.5 * h;
        let reparam = |p: f64| {
            if self.regularized_stream() {
                let r = p.abs();
                p.signum() * (r - c * (r / c).ln_1p())
            } else {
                p
            }
        };
        let cw = nx + 1;
        let mut psi = vec![0.0; cw * (ny + 1)];
        for j in 0..=ny {
            for i in 0..=nx {
                let x = grid.origin[0] + i as f64 * h;
                let y = grid.origin[1] + j as f64 * h;
                psi[j * cw + i] = reparam(self.stream(x, y));
            }
        }
        let m = self.anisotropy();
        let mut z = VectorField::zeros(grid);
        for j in 0..ny {
            for i in 0..nx {
                let k = grid.index(i, j);
                let ne = psi[(j + 1) * cw + i + 1];
                let se = psi[j * cw + i + 1];
                let nw = psi[(j + 1) * cw + i];
                z.x[k] = (ne - se) / h;
                z.y[k] = (nw - ne) / h;
            }
        }
        op.canonicalize(&mut z);
        let norm = m.norm();
        for k in 0..grid.len() {
            let p = op.project_cell(&m, norm, [z.x[k], z.y[k]], k);
            z.x[k] = p[0];
            z.y[k] = p[1];
        }
        Ok(z)
    }

    /// Boundary of Ω as a closed counterclockwise curve.
    pub fn boundary(&self) -> Vec<Piece> {
        match self.id {
            ScenarioId::SquareUpdown => vec![
                Piece::Segment { a: [0.0, 0.0], b: [1.0, 0.0] },
                Piece::Segment { a: [1.0, 0.0], b: [1.0, 1.0] },
                Piece::Segment { a: [1.0, 1.0], b: [0.0, 1.0] },
                Piece::Segment { a: [0.0, 1.0], b: [0.0, 0.0] },
            ],
            ScenarioId::BmDisk | ScenarioId::DiskArc => {
                vec![Piece::Arc { center: [0.0, 0.0], radius: 1.0, from: 0.0, to: 2.0 * PI }]
            }
            ScenarioId::Notch => vec![
                Piece::Arc { center: [0.0, 0.0], radius: 1.0, from: PI, to: 2.0 * PI },
                Piece::Segment { a: [1.0, 0.0], b: [0.5, BUMP] },
                Piece::Segment { a: [0.5, BUMP], b: [0.0, 0.0] },
                Piece::Segment { a: [0.0, 0.0], b: [-0.5, BUMP] },
                Piece::Segment { a: [-0.5, BUMP], b: [-1.0, 0.0] },
            ],
            ScenarioId::Fan3 => {
                let r = 5f64.sqrt();
                vec![
                    Piece::Arc { center: [1.0, 2.0], radius: r, from: (-2f64).atan2(-1.0), to: (-2f64).atan2(1.0) },
                    Piece::Arc { center: [0.0, 0.0], radius: 2.0, from: 0.0, to: FRAC_PI_2 },
                    Piece::Arc {
                        center: [2.0, 1.0],
                        radius: r,
                        from: 1f64.atan2(-2.0),
                        to: (-1f64).atan2(-2.0) + 2.0 * PI,
                    },
                ]
            }
        }
    }

    /// Point at arc length `s` (taken modulo the perimeter).
    pub fn boundary_point(&self, s: f64) -> Vec2 {
        let pieces = self.boundary();
        let total: f64 = pieces.iter().map(Piece::length).sum();
        let mut s = s.rem_euclid(total);
        for p in &pieces {
            let l = p.length();
            if s <= l {
                return p.at(s);
            }
            s -= l;
        }
        pieces[pieces.len() - 1].at(pieces[pieces.len() - 1].length())
    }

    pub fn perimeter(&self) -> f64 {
        self.boundary().iter().map(Piece::length).sum()
    }

    /// Local chord test at boundary samples spaced `step` apart that lie on
    /// Γ: the midpoint of the chord between the points at arc distance
    /// ±`step` must lie inside Ω. This is a sufficient condition only.
    pub fn barrier_diagnostic_2d(&self, step: f64) -> Result<Vec<BarrierSample>> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("step {step}")));
        }
        let total = self.perimeter();
        let count = (total / step).floor() as usize;
        let mut out = Vec::new();
        for i in 0..count {
            let s = i as f64 * step;
            let p = self.boundary_point(s);
            if !self.gamma(p[0], p[1]) {
                continue;
            }
            let a = self.boundary_point(s - step);
            let b = self.boundary_point(s + step);
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            out.push(BarrierSample { s, point: p, pass: self.inside(mid[0], mid[1]) });
        }
        Ok(out)
    }
}
