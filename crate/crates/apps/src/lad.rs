//! Least absolute deviations `min ||Ax - b||_1` and its relaxation.

use rand::Rng;
use rand_distr::StandardNormal;
use rsplit::linops::solve_partial;
use rsplit::{LinearOperator, LsSolvePolicy, Matrix, QuadraticRegularizer, RelaxedProblem, SeparableNonsmooth, Vector};

use crate::{seeded, AppError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LadInstance {
    pub a: Matrix,
    pub b: Vector,
    pub x_true: Vector,
    /// Rows that received a gross outlier.
    pub outliers: Vec<usize>,
}

/// Gaussian `A` and `x_t`, `b = A x_t + 0.1 eps + o` where each entry of `o`
/// is `+-10` with probability `outlier_fraction`.
pub fn generate_lad(m: usize, n: usize, outlier_fraction: f64, seed: u64) -> Result<LadInstance> {
    if m <= n || n == 0 {
        return Err(AppError::Invalid(format!("LAD needs m > n > 0, got {m}x{n}")));
    }
    if !(0.0..=1.0).contains(&outlier_fraction) {
        return Err(AppError::Invalid(format!("outlier fraction {outlier_fraction}")));
    }
    let mut r = seeded(seed);
    let a = Matrix::from_fn(m, n, |_, _| r.sample(StandardNormal));
    let x_true = Vector::from_fn(n, |_, _| r.sample(StandardNormal));
    let mut b = &a * &x_true;
    let mut outliers = Vec::new();
    for i in 0..m {
        b[i] += 0.1 * r.sample::<f64, _>(StandardNormal);
        if r.random::<f64>() < outlier_fraction {
            b[i] += if r.random::<bool>() { 10.0 } else { -10.0 };
            outliers.push(i);
        }
    }
    Ok(LadInstance { a, b, x_true, outliers })
}

/// `h = ||. - b||_1`, `g = 0`, on a dense `A`.
pub fn lad_setup(a: &Matrix, b: &Vector, nu: f64) -> Result<RelaxedProblem> {
    if a.nrows() != b.len() {
        return Err(AppError::Invalid("rows of A and length of b differ".into()));
    }
    let h = SeparableNonsmooth::l1_deviation(b.as_slice())?;
    Ok(RelaxedProblem::new(h, LinearOperator::dense(a.clone()), QuadraticRegularizer::Zero, nu, LsSolvePolicy::default())?)
}

/// Ordinary least squares, the baseline the l1 fit is compared against.
pub fn least_squares(a: &Matrix, b: &Vector) -> Result<Vector> {
    Ok(solve_partial(&LinearOperator::dense(a.clone()), &QuadraticRegularizer::Zero, b, 1.0, LsSolvePolicy::default())?)
}

pub fn l1_objective(a: &Matrix, b: &Vector, x: &Vector) -> f64 {
    (a * x - b).abs().sum()
}

pub fn relative_error(x: &Vector, x_true: &Vector) -> f64 {
    (x - x_true).norm() / x_true.norm().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_instance_has_small_residual() {
        let inst = generate_lad(40, 5, 0.0, 3).unwrap();
        assert!(inst.outliers.is_empty());
        let r = &inst.b - &inst.a * &inst.x_true;
        assert!(r.amax() < 0.5);
    }

    #[test]
    fn seeded_generation_is_bitwise_reproducible() {
        assert_eq!(generate_lad(30, 4, 0.1, 9).unwrap(), generate_lad(30, 4, 0.1, 9).unwrap());
        assert_ne!(generate_lad(30, 4, 0.1, 9).unwrap().b, generate_lad(30, 4, 0.1, 10).unwrap().b);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(generate_lad(4, 4, 0.1, 0).is_err());
        assert!(generate_lad(10, 4, 1.5, 0).is_err());
    }
}
