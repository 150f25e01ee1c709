use lgrad::certify::{verify_calibration, Tolerances};
use lgrad::grid::{DomainGrid, ScalarField, VectorField};
use lgrad::operators::{
    dual_lower_bound, dual_objective, op_norm_bound, pairing_density, primal_objective, GradientOperator,
};
use lgrad::scenarios::{all, Scenario};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scenario(i: usize) -> &'static Scenario {
    &all()[i % all().len()]
}

fn random_u(grid: &DomainGrid, rng: &mut ChaCha8Rng, amp: f64) -> ScalarField {
    let mut u = ScalarField::zeros(grid);
    for k in grid.inside_cells() {
        u.values[k] = rng.gen_range(-amp..amp);
    }
    u
}

fn random_z(grid: &DomainGrid, rng: &mut ChaCha8Rng) -> VectorField {
    let mut z = VectorField::zeros(grid);
    for k in 0..grid.len() {
        z.x[k] = rng.gen_range(-1.5..1.5);
        z.y[k] = rng.gen_range(-1.5..1.5);
    }
    z
}

/// Scale z into the Euclidean polar ball: jointly on inside cells, per
/// component on the ghost cells outside.
fn make_feasible(grid: &DomainGrid, op: &GradientOperator, z: &mut VectorField) {
    op.canonicalize(z);
    for k in 0..grid.len() {
        if grid.is_inside(k) {
            let r = z.x[k].hypot(z.y[k]);
            if r > 1.0 {
                z.x[k] /= r * (1.0 + 1e-15);
                z.y[k] /= r * (1.0 + 1e-15);
            }
        } else {
            z.x[k] = z.x[k].clamp(-1.0, 1.0);
            z.y[k] = z.y[k].clamp(-1.0, 1.0);
        }
    }
}

fn norm_cells(op: &GradientOperator, u: &ScalarField) -> f64 {
    op.inner_cells(u, u).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gradient_and_divergence_are_adjoint(which in 0usize..5, n in 6usize..28, seed in any::<u64>()) {
        let s = scenario(which);
        let (grid, _, op) = s.discretize(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_u(&grid, &mut rng, 1.0);
        let mut z = random_z(&grid, &mut rng);
        op.canonicalize(&mut z);
        let ku = op.grad_linear(&u).unwrap();
        let div = op.div_adjoint(&z).unwrap();
        let lhs = op.inner_slots(&ku, &z) + op.inner_cells(&u, &div);
        let scale = norm_cells(&op, &u) * op.inner_slots(&z, &z).sqrt();
        prop_assert!(lhs.abs() <= 1e-12 * scale.max(1e-300), "{} n={n}: {lhs}", s.name);
    }

    #[test]
    fn weak_duality(which in 0usize..5, n in 6usize..24, seed in any::<u64>()) {
        let s = scenario(which);
        let (grid, _, op) = s.discretize(n).unwrap();
        let m = s.anisotropy();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_u(&grid, &mut rng, 2.0);
        let mut z = random_z(&grid, &mut rng);
        make_feasible(&grid, &op, &mut z);
        let p = primal_objective(&m, &op, &u).unwrap();
        let lb = dual_lower_bound(&op, &z).unwrap();
        prop_assert!(lb <= p + 1e-12 * p.abs().max(1.0), "{}: bound {lb} primal {p}", s.name);
    }

    /// P(u) − D(z) = Σ h² (φ(g) − z·g) − ⟨u, div z⟩ for every pair, so
    /// |gap| ≤ max(1, P)·r_pair + ‖u‖∞·|Ω|·max|div z|.
    #[test]
    fn gap_splits_into_pairing_and_divergence(which in 0usize..5, n in 6usize..24, seed in any::<u64>()) {
        let s = scenario(which);
        let (grid, faces, op) = s.discretize(n).unwrap();
        let m = s.anisotropy();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_u(&grid, &mut rng, 1.0);
        let mut z = random_z(&grid, &mut rng);
        make_feasible(&grid, &op, &mut z);
        let p = primal_objective(&m, &op, &u).unwrap();
        let d = dual_objective(&op, &z).unwrap();
        let (pair, phi) = pairing_density(&m, &op, &u, &z).unwrap();
        let h2 = grid.h * grid.h;
        let defect: f64 = phi.values.iter().zip(&pair.values).map(|(a, b)| a - b).sum::<f64>() * h2;
        let div = op.div_adjoint(&z).unwrap();
        let coupling = op.inner_cells(&u, &div);
        prop_assert!((p - d - (defect - coupling)).abs() <= 1e-10 * p.abs().max(1.0));

        let r = verify_calibration(&m, &grid, &faces, &u, &z, &Tolerances::grid_scale(n as f64)).unwrap();
        let umax = u.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let area = grid.inside_count() as f64 * h2;
        let div_all = grid.inside_cells().fold(0.0f64, |a, k| a.max(div.values[k].abs()));
        let bound = p.max(1.0) * r.r_pair + umax * area * div_all;
        prop_assert!(r.gap.abs() <= bound * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn tolerance_monotone(which in 0usize..5, seed in any::<u64>(), grow in 1.0f64..10.0) {
        let s = scenario(which);
        let (grid, faces, op) = s.discretize(12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_u(&grid, &mut rng, 1.0);
        let mut z = random_z(&grid, &mut rng);
        make_feasible(&grid, &op, &mut z);
        let t = Tolerances { r_div: 1.0, r_feas: 0.0, r_pair: 0.5, r_sign: 0.5, ..Tolerances::grid_scale(12.0) };
        let r = verify_calibration(&s.anisotropy(), &grid, &faces, &u, &z, &t).unwrap();
        let looser = Tolerances { r_div: t.r_div * grow, r_pair: t.r_pair * grow, r_sign: t.r_sign * grow, ..t.clone() };
        prop_assert!(!r.pass || r.passes(&looser));
        for v in [r.r_div, r.r_feas, r.r_pair, r.r_sign, r.r_neumann] {
            prop_assert!(v >= 0.0);
        }
    }
}

/// Power iteration on KᵀK stays below the analytic bound (√8/h)².
#[test]
fn operator_norm_bound_holds() {
    for s in all() {
        let (grid, _, op) = s.discretize(24).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut u = random_u(&grid, &mut rng, 1.0);
        let mut est = 0.0;
        for _ in 0..300 {
            let ku = op.grad_linear(&u).unwrap();
            let mut ktk = op.div_adjoint(&ku).unwrap();
            for v in &mut ktk.values {
                *v = -*v;
            }
            let nu = norm_cells(&op, &u);
            est = op.inner_cells(&u, &ktk) / (nu * nu);
            let nk = norm_cells(&op, &ktk);
            for (a, b) in u.values.iter_mut().zip(&ktk.values) {
                *a = b / nk;
            }
        }
        let bound = op_norm_bound(&grid);
        assert!(est.sqrt() <= bound, "{}: {} > {}", s.name, est.sqrt(), bound);
        assert!(est.sqrt() >= 0.8 * bound, "{}: estimate {} suspiciously small", s.name, est.sqrt());
    }
}
