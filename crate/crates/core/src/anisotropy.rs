//! Metric integrands φ(x, ξ), their polars φ⁰(x, ξ*) and the projection onto
//! the polar unit ball used by the dual update.
//!
//! Every supported kind has the form φ(x, ξ) = w(x)·‖ξ‖_p with p ∈ {1, 2, ∞}
//! and a cell weight w (identically 1 unless the kind is weighted), so the
//! polar is ‖ξ*‖_q / w(x) with 1/p + 1/q = 1 and the projection is exact.

use std::f64::consts::SQRT_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];

/// The underlying ℓp norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl Norm {
    #[inline]
    pub fn eval(self, v: Vec2) -> f64 {
        match self {
            Norm::L1 => v[0].abs() + v[1].abs(),
            Norm::L2 => v[0].hypot(v[1]),
            Norm::LInf => v[0].abs().max(v[1].abs()),
        }
    }

    /// The dual norm.
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::LInf,
            Norm::L2 => Norm::L2,
            Norm::LInf => Norm::L1,
        }
    }

    /// Euclidean-nearest point of {v : dual(v) ≤ radius}. The result
    /// satisfies dual(p) / radius ≤ 1 exactly in floating point.
    #[inline]
    pub fn project_dual_ball(self, v: Vec2, radius: f64) -> Vec2 {
        let dual = self.dual();
        if dual.eval(v) <= radius {
            return v;
        }
        let mut p = match self {
            Norm::L2 => {
                let s = radius / v[0].hypot(v[1]);
                [v[0] * s, v[1] * s]
            }
            Norm::L1 => [v[0].clamp(-radius, radius), v[1].clamp(-radius, radius)],
            Norm::LInf => project_l1_ball(v, radius),
        };
        while dual.eval(p) / radius > 1.0 {
            p = [p[0] * (1.0 - f64::EPSILON), p[1] * (1.0 - f64::EPSILON)];
        }
        p
    }
}

fn project_l1_ball(v: Vec2, radius: f64) -> Vec2 {
    let (a, b) = (v[0].abs(), v[1].abs());
    if a + b <= radius {
        return v;
    }
    // soft threshold with the shift μ making the result land on the sphere
    let mu = 0.5 * (a + b - radius);
    let (pa, pb) = if a - mu >= 0.0 && b - mu >= 0.0 {
        (a - mu, b - mu)
    } else if a >= b {
        (radius, 0.0)
    } else {
        (0.0, radius)
    };
    [pa.copysign(v[0]), pb.copysign(v[1])]
}

/// Supported exponents for the ℓp kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    One,
    Two,
    Infinity,
}

impl Exponent {
    fn norm(self) -> Norm {
        match self {
            Exponent::One => Norm::L1,
            Exponent::Two => Norm::L2,
            Exponent::Infinity => Norm::LInf,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnisotropyKind {
    Euclidean,
    /// a(x)|ξ| with one weight per grid cell (entries off the domain may be NaN).
    Weighted(Vec<f64>),
    PNorm(Exponent),
}

/// A metric integrand together with its computed ellipticity constants
/// λ|ξ| ≤ φ(x, ξ) ≤ Λ|ξ|.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricIntegrand {
    kind: AnisotropyKind,
    lambda: f64,
    upper: f64,
}

impl MetricIntegrand {
    pub fn euclidean() -> Self {
        Self { kind: AnisotropyKind::Euclidean, lambda: 1.0, upper: 1.0 }
    }

    pub fn pnorm(p: Exponent) -> Self {
        let (lambda, upper) = match p {
            Exponent::One => (1.0, SQRT_2),
            Exponent::Two => (1.0, 1.0),
            Exponent::Infinity => (1.0 / SQRT_2, 1.0),
        };
        Self { kind: AnisotropyKind::PNorm(p), lambda, upper }
    }

    /// Weighted integrand a(x)|ξ|. NaN entries mark cells off the domain and
    /// are ignored for λ, Λ; negative or infinite weights are rejected. A zero
    /// weight is accepted here and surfaces as λ = 0 in [`check_integrand`].
    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        let mut lambda = f64::INFINITY;
        let mut upper = 0.0_f64;
        for (i, &a) in weights.iter().enumerate() {
            if a.is_nan() {
                continue;
            }
            if !a.is_finite() || a < 0.0 {
                return Err(Error::InvalidArgument(format!("weight {a} at cell {i}")));
            }
            lambda = lambda.min(a);
            upper = upper.max(a);
        }
        if lambda.is_infinite() {
            return Err(Error::InvalidArgument("weight field has no finite entries".into()));
        }
        Ok(Self { kind: AnisotropyKind::Weighted(weights), lambda, upper })
    }

    pub fn kind(&self) -> &AnisotropyKind {
        &self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Upper ellipticity constant Λ.
    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, AnisotropyKind::Euclidean | AnisotropyKind::PNorm(Exponent::Two))
    }

    pub fn norm(&self) -> Norm {
        match &self.kind {
            AnisotropyKind::Euclidean | AnisotropyKind::Weighted(_) => Norm::L2,
            AnisotropyKind::PNorm(p) => p.norm(),
        }
    }

    /// Weight at a cell; 1 for unweighted kinds. Out-of-range cells of a
    /// weighted kind read as NaN.
    #[inline]
    pub fn weight(&self, cell: usize) -> f64 {
        match &self.kind {
            AnisotropyKind::Weighted(a) => a.get(cell).copied().unwrap_or(f64::NAN),
            _ => 1.0,
        }
    }

    /// The weight vector if this kind carries one.
    pub fn weights(&self) -> Option<&[f64]> {
        match &self.kind {
            AnisotropyKind::Weighted(a) => Some(a),
            _ => None,
        }
    }

    fn checked_weight(&self, cell: usize) -> Result<f64> {
        let w = self.weight(cell);
        if w.is_nan() {
            return Err(Error::InvalidArgument(format!("cell {cell} carries no weight")));
        }
        Ok(w)
    }

    pub fn eval_phi(&self, cell: usize, xi: Vec2) -> Result<f64> {
        finite(xi)?;
        Ok(self.checked_weight(cell)? * self.norm().eval(xi))
    }

    pub fn eval_polar(&self, cell: usize, xistar: Vec2) -> Result<f64> {
        finite(xistar)?;
        Ok(self.norm().dual().eval(xistar) / self.checked_weight(cell)?)
    }

    pub fn project_polar_ball(&self, cell: usize, z: Vec2) -> Result<Vec2> {
        finite(z)?;
        Ok(self.norm().project_dual_ball(z, self.checked_weight(cell)?))
    }

    /// Unchecked kernels on an explicit weight, used in the hot loops.
    #[inline]
    pub(crate) fn phi_with(norm: Norm, w: f64, xi: Vec2) -> f64 {
        w * norm.eval(xi)
    }

    #[inline]
    pub(crate) fn polar_with(norm: Norm, w: f64, xistar: Vec2) -> f64 {
        norm.dual().eval(xistar) / w
    }
}

impl fmt::Display for MetricIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AnisotropyKind::Euclidean => write!(f, "euclidean"),
            AnisotropyKind::Weighted(_) => write!(f, "weighted"),
            AnisotropyKind::PNorm(Exponent::One) => write!(f, "p1"),
            AnisotropyKind::PNorm(Exponent::Two) => write!(f, "p2"),
            AnisotropyKind::PNorm(Exponent::Infinity) => write!(f, "pinf"),
        }
    }
}

fn finite(v: Vec2) -> Result<()> {
    if v[0].is_finite() && v[1].is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("non-finite vector ({}, {})", v[0], v[1])))
    }
}

/// Worst observed violation of each integrand invariant.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IntegrandReport {
    pub samples: usize,
    pub homogeneity: f64,
    pub ellipticity: f64,
    pub convexity: f64,
    pub cauchy_schwarz: f64,
    pub bipolar: f64,
    /// λ ≤ 0: the integrand is not uniformly elliptic.
    pub degenerate: bool,
}

impl IntegrandReport {
    pub fn worst(&self) -> f64 {
        [self.homogeneity, self.ellipticity, self.convexity, self.cauchy_schwarz, self.bipolar]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn ok(&self, tol: f64) -> bool {
        !self.degenerate && self.worst() <= tol
    }
}

const CHECK_SEED: u64 = 0x1a_0b_5e_ed;
const BIPOLAR_DIRECTIONS: usize = 720;

/// Evaluate the integrand invariants on `samples` seeded random draws.
pub fn check_integrand(m: &MetricIntegrand, samples: usize) -> Result<IntegrandReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(CHECK_SEED);
    let cells: Vec<usize> = match m.weights() {
        Some(a) => (0..a.len()).filter(|&i| !a[i].is_nan()).collect(),
        None => vec![0],
    };
    let norm = m.norm();
    let mut rep = IntegrandReport { samples, degenerate: m.lambda <= 0.0, ..Default::default() };
    let draw = |rng: &mut ChaCha8Rng| -> Vec2 { [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)] };
    for _ in 0..samples {
        let cell = cells[rng.gen_range(0..cells.len())];
        let w = m.weight(cell);
        let phi = |v: Vec2| MetricIntegrand::phi_with(norm, w, v);
        let (xi, eta, star) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let t: f64 = rng.gen_range(-4.0..4.0);

        let scaled = phi([t * xi[0], t * xi[1]]);
        rep.homogeneity = rep.homogeneity.max((scaled - t.abs() * phi(xi)).abs());

        let e = xi[0].hypot(xi[1]);
        let p = phi(xi);
        rep.ellipticity = rep.ellipticity.max((m.lambda * e - p).max(p - m.upper * e).max(0.0));

        let mid = phi([0.5 * (xi[0] + eta[0]), 0.5 * (xi[1] + eta[1])]);
        rep.convexity = rep.convexity.max(mid - 0.5 * (phi(xi) + phi(eta)));

        let polar = MetricIntegrand::polar_with(norm, w, star);
        let dot = star[0] * xi[0] + star[1] * xi[1];
        rep.cauchy_schwarz = rep.cauchy_schwarz.max(dot - polar * p);

        if w > 0.0 {
            let sup = (0..BIPOLAR_DIRECTIONS)
                .map(|k| {
                    let a = std::f64::consts::TAU * k as f64 / BIPOLAR_DIRECTIONS as f64;
                    let d = [a.cos(), a.sin()];
                    let s = phi(d);
                    (star[0] * d[0] + star[1] * d[1]) / s
                })
                .fold(f64::NEG_INFINITY, f64::max);
            // angular sampling under-resolves the sup by O(step²)
            let slack = polar * 1e-3;
            rep.bipolar = rep.bipolar.max((sup - polar).abs() - slack).max(0.0);
        }
    }
    Ok(rep)
}
