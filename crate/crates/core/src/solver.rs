//! First-order primal–dual splitting for the relaxed functional.
//!
//! The saddle problem is min_u max_z ⟨K u + b, z⟩ subject to φ⁰(x, z) ≤ 1.
//! Each iteration performs
//!
//! ```text
//! z  ← P(z + σ (K ū + b))
//! u⁺ ← u + τ div z
//! ū  ← u⁺ + θ (u⁺ − u)
//! ```
//!
//! with θ = 1 and τ = σ = h/√8 by default. Progress is measured by the gap
//! between the primal objective and the box-constrained dual bound of
//! [`crate::operators::dual_lower_bound`], which never exceeds the optimum.
//!
//! At every logged iteration the running average of the iterates since the
//! last restart is scored as well. When the better of the two has cut the gap
//! by a fixed factor (or the current run has grown long relative to the total),
//! the method restarts from it. The returned pair is the best one scored.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anisotropy::MetricIntegrand;
use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{DomainGrid, ScalarField, VectorField};
use crate::operators::{dual_lower_bound_with_div, op_norm_bound, primal_from_grad, GradientOperator};

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub max_iters: usize,
    /// Stop once (primal − dual) / max(1, |primal|) falls below this.
    pub gap_tol: f64,
    pub theta: f64,
    /// Primal step; `None` selects h/√8.
    pub tau: Option<f64>,
    /// Dual step; `None` selects h/√8.
    pub sigma: Option<f64>,
    /// With no explicit `u0`, a seed draws the initial guess uniformly from
    /// the datum range; without either, u starts at 0.
    pub seed: Option<u64>,
    pub u0: Option<ScalarField>,
    /// Objectives are evaluated at iteration 1 and every `log_every` iterations.
    pub log_every: usize,
    /// Restart from the running average when it has cut the gap enough.
    pub restart: bool,
    /// Restart once the gap falls below this fraction of its value at the
    /// previous restart.
    pub restart_beta: f64,
    /// Also restart once the current run is this fraction of all iterations.
    pub restart_artificial: f64,
    pub parallel: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            gap_tol: 1e-5,
            theta: 1.0,
            tau: None,
            sigma: None,
            seed: None,
            u0: None,
            log_every: 100,
            restart: true,
            restart_beta: 0.2,
            restart_artificial: 0.36,
            parallel: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEntry {
    pub iter: usize,
    pub primal: f64,
    /// Certified lower bound on the optimum.
    pub dual: f64,
    pub gap: f64,
}

impl TraceEntry {
    pub fn rel_gap(&self) -> f64 {
        self.gap / self.primal.abs().max(1.0)
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub u: ScalarField,
    pub z: VectorField,
    pub trace: Vec<TraceEntry>,
    /// Objectives of the returned pair (the best logged entry).
    pub result: TraceEntry,
    pub converged: bool,
    pub iters_used: usize,
}

impl SolveReport {
    pub fn primal(&self) -> f64 {
        self.result.primal
    }

    pub fn dual(&self) -> f64 {
        self.result.dual
    }

    pub fn gap(&self) -> f64 {
        self.result.gap
    }

    pub fn rel_gap(&self) -> f64 {
        self.result.rel_gap()
    }
}

/// Step sizes after defaulting and validation.
pub fn step_sizes(grid: &DomainGrid, cfg: &SolveConfig) -> Result<(f64, f64)> {
    let default = grid.h / 8f64.sqrt();
    let tau = cfg.tau.unwrap_or(default);
    let sigma = cfg.sigma.unwrap_or(default);
    if !(tau > 0.0 && sigma > 0.0 && tau.is_finite() && sigma.is_finite()) {
        return Err(Error::Config(format!("step sizes must be positive (tau={tau}, sigma={sigma})")));
    }
    let l = op_norm_bound(grid);
    if tau * sigma * l * l > 1.0 + 1e-12 {
        return Err(Error::Config(format!("tau·sigma·‖K‖² = {} exceeds 1", tau * sigma * l * l)));
    }
    Ok((tau, sigma))
}

impl SolveConfig {
    /// Checks that do not depend on the grid.
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.gap_tol >= 0.0) {
            return Err(Error::Config(format!("gap_tol {}", self.gap_tol)));
        }
        if self.log_every == 0 {
            return Err(Error::Config("log_every must be at least 1".into()));
        }
        if !(self.restart_beta > 0.0 && self.restart_beta < 1.0) {
            return Err(Error::Config(format!("restart_beta {} outside (0, 1)", self.restart_beta)));
        }
        if !(self.restart_artificial > 0.0 && self.restart_artificial <= 1.0) {
            return Err(Error::Config(format!("restart_artificial {} outside (0, 1]", self.restart_artificial)));
        }
        if !(self.theta.is_finite() && (0.0..=1.0).contains(&self.theta)) {
            return Err(Error::Config(format!("theta {} outside [0, 1]", self.theta)));
        }
        Ok(())
    }
}

fn validate(m: &MetricIntegrand, grid: &DomainGrid, op: &GradientOperator, cfg: &SolveConfig) -> Result<()> {
    cfg.validate()?;
    if op.len() != grid.len() {
        return Err(Error::ShapeMismatch("operator and grid disagree".into()));
    }
    if let Some(w) = m.weights() {
        if w.len() != grid.len() {
            return Err(Error::ShapeMismatch("weight field does not match the grid".into()));
        }
        for k in grid.inside_cells() {
            let a = m.weight(k);
            if !(a > 0.0 && a.is_finite()) {
                let (i, j) = grid.coords(k);
                return Err(Error::Config(format!("weight {a} at inside cell ({i}, {j}) is not positive")));
            }
        }
    }
    Ok(())
}

fn initial_guess(grid: &DomainGrid, op: &GradientOperator, cfg: &SolveConfig) -> Result<Vec<f64>> {
    if let Some(u0) = &cfg.u0 {
        return Ok(ScalarField::from_raw(grid, u0.values.clone())?.values);
    }
    let mut u = vec![0.0; grid.len()];
    if let Some(seed) = cfg.seed {
        let (lo, hi) = op.datum_range();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in grid.inside_cells() {
            u[k] = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        }
    }
    Ok(u)
}

/// Minimize the discrete relaxed functional and return the primal–dual pair.
pub fn solve(m: &MetricIntegrand, grid: &DomainGrid, op: &GradientOperator, cfg: &SolveConfig) -> Result<SolveReport> {
    validate(m, grid, op, cfg)?;
    let (tau, sigma) = step_sizes(grid, cfg)?;
    let op = op.clone().with_parallel(cfg.parallel);
    let op = &op;
    let norm = m.norm();
    let nx = grid.nx;
    let len = grid.len();

    let mut u = initial_guess(grid, op, cfg)?;
    let mut u_prev = vec![0.0; len];
    let mut ubar = u.clone();
    let mut z = VectorField::zeros(grid);
    let mut avg = Average::new(len);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iters_used = 0;
    let mut restart_gap = f64::INFINITY;
    let mut best: Option<(TraceEntry, Vec<f64>, VectorField)> = None;

    for iter in 1..=cfg.max_iters {
        iters_used = iter;
        {
            let ubar = &ubar;
            exec::for_rows2(&mut z.x, &mut z.y, nx, cfg.parallel, |j, zx, zy| {
                for i in 0..nx {
                    let k = j * nx + i;
                    if !(op.active_x[k] || op.active_y[k]) {
                        continue;
                    }
                    let g = [
                        (op.to_x[k] * ubar.get(k + 1).copied().unwrap_or(0.0) - op.from_x[k] * ubar[k] + op.b_x[k])
                            / op.h,
                        (op.to_y[k] * ubar.get(k + nx).copied().unwrap_or(0.0) - op.from_y[k] * ubar[k] + op.b_y[k])
                            / op.h,
                    ];
                    let p = op.project_cell(m, norm, [zx[i] + sigma * g[0], zy[i] + sigma * g[1]], k);
                    zx[i] = p[0];
                    zy[i] = p[1];
                }
            });
        }
        std::mem::swap(&mut u, &mut u_prev);
        {
            let (z, u_prev) = (&z, &u_prev);
            let theta = cfg.theta;
            exec::for_rows2(&mut u, &mut ubar, nx, cfg.parallel, |j, ur, br| {
                for i in 0..nx {
                    let k = j * nx + i;
                    if op.inside[k] {
                        let next = u_prev[k] + tau * op.div_at(&z.x, &z.y, k);
                        ur[i] = next;
                        br[i] = next + theta * (next - u_prev[k]);
                    } else {
                        ur[i] = 0.0;
                        br[i] = 0.0;
                    }
                }
            });
        }
        if cfg.restart {
            avg.add(&u, &z);
        }

        if iter == 1 || iter % cfg.log_every == 0 || iter == cfg.max_iters {
            let current = evaluate(m, op, &u, &z, iter)?;
            let mut entry = current;
            let mut from_avg = None;
            if cfg.restart {
                let (ua, za) = avg.mean(m, op);
                let e = evaluate(m, op, &ua, &za, iter)?;
                if e.gap < current.gap {
                    entry = e;
                    from_avg = Some((ua, za));
                }
                if entry.gap <= cfg.restart_beta * restart_gap
                    || avg.count as f64 >= cfg.restart_artificial * iter as f64
                {
                    if let Some((ua, za)) = &from_avg {
                        u.copy_from_slice(ua);
                        z = za.clone();
                    }
                    ubar.copy_from_slice(&u);
                    avg.reset();
                    restart_gap = entry.gap;
                }
            }
            if best.as_ref().is_none_or(|b| entry.gap < b.0.gap) {
                best = Some(match from_avg {
                    Some((ua, za)) => (entry, ua, za),
                    None => (entry, u.clone(), z.clone()),
                });
            }
            trace.push(entry);
            if entry.rel_gap() <= cfg.gap_tol {
                converged = true;
                break;
            }
        }
    }

    let (result, u, z) = best.expect("the last iteration is always logged");
    Ok(SolveReport { u: ScalarField { values: u }, z, trace, result, converged, iters_used })
}

/// Running mean of the iterates since the last restart.
struct Average {
    u: Vec<f64>,
    zx: Vec<f64>,
    zy: Vec<f64>,
    count: usize,
}

impl Average {
    fn new(len: usize) -> Self {
        Self { u: vec![0.0; len], zx: vec![0.0; len], zy: vec![0.0; len], count: 0 }
    }

    fn add(&mut self, u: &[f64], z: &VectorField) {
        for (a, b) in self.u.iter_mut().zip(u) {
            *a += b;
        }
        for (a, b) in self.zx.iter_mut().zip(&z.x) {
            *a += b;
        }
        for (a, b) in self.zy.iter_mut().zip(&z.y) {
            *a += b;
        }
        self.count += 1;
    }

    fn reset(&mut self) {
        self.u.iter_mut().for_each(|v| *v = 0.0);
        self.zx.iter_mut().for_each(|v| *v = 0.0);
        self.zy.iter_mut().for_each(|v| *v = 0.0);
        self.count = 0;
    }

    /// Mean pair; z is projected again so rounding cannot leave the ball.
    fn mean(&self, m: &MetricIntegrand, op: &GradientOperator) -> (Vec<f64>, VectorField) {
        let c = 1.0 / self.count.max(1) as f64;
        let u = self.u.iter().map(|v| v * c).collect();
        let norm = m.norm();
        let mut z = VectorField { x: vec![0.0; self.zx.len()], y: vec![0.0; self.zy.len()] };
        for k in 0..self.zx.len() {
            let p = op.project_cell(m, norm, [self.zx[k] * c, self.zy[k] * c], k);
            z.x[k] = p[0];
            z.y[k] = p[1];
        }
        (u, z)
    }
}

fn evaluate(m: &MetricIntegrand, op: &GradientOperator, u: &[f64], z: &VectorField, iter: usize) -> Result<TraceEntry> {
    let uf = ScalarField { values: u.to_vec() };
    let g = op.grad(&uf)?;
    let primal = primal_from_grad(m, op, &g);
    let div = op.div_adjoint(z)?;
    let dual = dual_lower_bound_with_div(op, z, &div.values);
    if !primal.is_finite() || !dual.is_finite() {
        return Err(Error::NumericalFailure {
            iter,
            reason: format!("objectives not finite (primal={primal}, dual={dual})"),
        });
    }
    Ok(TraceEntry { iter, primal, dual, gap: primal - dual })
}
