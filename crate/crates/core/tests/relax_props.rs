mod common;

use common::*;
use proptest::prelude::*;
use rsplit::linops::projection_residual;
use rsplit::oracles::finite_difference_directional;
use rsplit::prox::{BlockProxKind, ScalarProxKind};
use rsplit::{LinearOperator, LsSolvePolicy, QuadraticRegularizer, RelaxedProblem, SeparableNonsmooth, Vector};

fn instance(seed: u64, which: usize, nu: f64) -> RelaxedProblem {
    let mut r = rng(seed);
    let (op, g) = match which % 5 {
        0 => (LinearOperator::dense(gaussian_matrix(&mut r, 12, 5)), QuadraticRegularizer::Zero),
        1 => (LinearOperator::dense(gaussian_matrix(&mut r, 6, 9)), QuadraticRegularizer::Ridge(0.4)),
        2 => {
            let op = LinearOperator::pairwise_difference(5, 2).unwrap();
            let u = gaussian_vector(&mut r, 10);
            (op, QuadraticRegularizer::Tracking(u))
        }
        3 => {
            let signs = (0..2).map(|_| random_signs(&mut r, 8)).collect();
            (LinearOperator::hadamard_stack(8, signs).unwrap(), QuadraticRegularizer::Zero)
        }
        _ => {
            let ops = vec![LinearOperator::dense(gaussian_matrix(&mut r, 4, 3)), LinearOperator::identity(3)];
            (LinearOperator::stack(ops).unwrap(), QuadraticRegularizer::Tracking(gaussian_vector(&mut r, 3)))
        }
    };
    let h = SeparableNonsmooth::scalar(vec![ScalarProxKind::SymmetricLogistic; op.rows()], 1.0).unwrap();
    RelaxedProblem::new(h, op, g, nu, LsSolvePolicy::default()).unwrap()
}

#[test]
fn gradient_matches_finite_differences() {
    for which in 0..5 {
        let p = instance(40 + which as u64, which, 0.7);
        let mut r = rng(which as u64);
        let w = gaussian_vector(&mut r, p.rows());
        let x = p.partial_minimize(&w).unwrap();
        let grad = p.grad_g_nu(&w, &x).unwrap();
        for _ in 0..20 {
            let d = gaussian_vector(&mut r, p.rows());
            let fd = finite_difference_directional(|v| p.g_nu(v).unwrap(), &w, &d, 1e-5);
            let exact = grad.dot(&d);
            let rel = (fd - exact).abs() / (grad.norm() * d.norm()).max(1e-12);
            assert!(rel <= 1e-5, "instance {which}: fd {fd} exact {exact}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn gradient_lipschitz(seed in any::<u64>(), which in 0usize..5, nu in 0.1f64..3.0) {
        let p = instance(seed, which, nu);
        let mut r = rng(seed ^ 1);
        let w1 = gaussian_vector(&mut r, p.rows());
        let w2 = gaussian_vector(&mut r, p.rows());
        let g1 = p.grad_g_nu(&w1, &p.partial_minimize(&w1).unwrap()).unwrap();
        let g2 = p.grad_g_nu(&w2, &p.partial_minimize(&w2).unwrap()).unwrap();
        prop_assert!((g1 - g2).norm() <= (&w1 - &w2).norm() / nu * (1.0 + 1e-9));
    }

    #[test]
    fn g_nu_midpoint_convex(seed in any::<u64>(), which in 0usize..5) {
        let p = instance(seed, which, 0.9);
        let mut r = rng(seed ^ 2);
        let w1 = gaussian_vector(&mut r, p.rows());
        let w2 = gaussian_vector(&mut r, p.rows());
        let mid = (&w1 + &w2) * 0.5;
        let lhs = p.g_nu(&mid).unwrap();
        let rhs = 0.5 * (p.g_nu(&w1).unwrap() + p.g_nu(&w2).unwrap());
        prop_assert!(lhs <= rhs + 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn partial_min_dominates(seed in any::<u64>(), which in 0usize..5) {
        let p = instance(seed, which, 1.3);
        let mut r = rng(seed ^ 3);
        let w = gaussian_vector(&mut r, p.rows());
        let x = p.partial_minimize(&w).unwrap();
        let best = p.objective(&w, &x).unwrap();
        for _ in 0..100 {
            let other = &x + gaussian_vector(&mut r, p.cols()) * 0.5;
            prop_assert!(best <= p.objective(&w, &other).unwrap() + 1e-12);
        }
    }

    #[test]
    fn zero_g_value_is_projection_residual(seed in any::<u64>(), nu in 0.1f64..3.0) {
        let p = instance(seed, 0, nu);
        let mut r = rng(seed ^ 4);
        let w = gaussian_vector(&mut r, p.rows());
        let res = projection_residual(p.op(), &w).unwrap();
        let expect = res.norm_squared() / (2.0 * nu);
        prop_assert!((p.g_nu(&w).unwrap() - expect).abs() <= 1e-8 * (1.0 + expect));
    }
}

#[test]
fn partial_minimize_residual_on_dense_instance() {
    let p = instance(77, 1, 0.5);
    let mut r = rng(77);
    let w = gaussian_vector(&mut r, p.rows());
    let x = p.partial_minimize(&w).unwrap();
    let grad = p.op().adjoint(&(p.op().apply(&x).unwrap() - &w)).unwrap() / p.nu() + p.g().gradient(&x);
    assert!(grad.norm() <= 1e-10 * (1.0 + w.norm()));
}

#[test]
fn objective_equals_reduced_at_partial_min() {
    let p = instance(3, 2, 0.6);
    let mut r = rng(3);
    let w = gaussian_vector(&mut r, p.rows());
    let x = p.partial_minimize(&w).unwrap();
    assert!((p.objective(&w, &x).unwrap() - p.reduced_objective(&w).unwrap()).abs() < 1e-14);
}

#[test]
fn block_plan_objective() {
    let op = LinearOperator::pairwise_difference(3, 2).unwrap();
    let h = SeparableNonsmooth::blocks(3, 2, BlockProxKind::GroupL2, 0.5).unwrap();
    let u = Vector::from_vec(vec![0.0, 0.0, 3.0, 4.0, 0.0, 0.0]);
    let p = RelaxedProblem::new(h, op, QuadraticRegularizer::Tracking(u.clone()), 1.0, LsSolvePolicy::default()).unwrap();
    let w = p.op().apply(&u).unwrap();
    // pairs (0,1), (0,2), (1,2): norms 5, 0, 5
    assert!((p.objective(&w, &u).unwrap() - 5.0).abs() < 1e-14);
}
