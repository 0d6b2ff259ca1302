//! Semi-supervised logistic regression: logistic loss on labeled rows, the
//! symmetric loss `log(1 + exp(-|z|))` on unlabeled rows, ridge on `x`.

use rand::Rng;
use rand_distr::StandardNormal;
use rsplit::prox::ScalarProxKind;
use rsplit::solvers::{rs_pgd, SolveResult};
use rsplit::{LinearOperator, LsSolvePolicy, Matrix, QuadraticRegularizer, RelaxedProblem, SeparableNonsmooth, SolveOptions, Term, Vector};

use crate::{seeded, AppError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SslrData {
    /// Training features; the first `labeled` rows carry labels.
    pub train: Matrix,
    pub labels: Vec<f64>,
    pub labeled: usize,
    pub test: Matrix,
    pub test_labels: Vec<f64>,
}

fn two_gaussian_rows(rng: &mut impl Rng, m: usize, mean: &Vector) -> (Matrix, Vec<f64>) {
    let d = mean.len();
    let mut x = Matrix::zeros(m, d);
    let mut y = Vec::with_capacity(m);
    for i in 0..m {
        let label = if rng.random::<bool>() { 1.0 } else { -1.0 };
        for a in 0..d {
            x[(i, a)] = label * mean[a] + rng.sample::<f64, _>(StandardNormal);
        }
        y.push(label);
    }
    (x, y)
}

/// Classes `+-mu + N(0, I)` in dimension `d` with `||2 mu|| = separation`
/// along the all-ones direction. `ceil(label_fraction m)` training rows
/// are labeled (at least one).
pub fn two_gaussians(m: usize, m_test: usize, d: usize, separation: f64, label_fraction: f64, seed: u64) -> Result<SslrData> {
    if m == 0 || d == 0 || !(0.0..=1.0).contains(&label_fraction) {
        return Err(AppError::Invalid("bad two-Gaussian parameters".into()));
    }
    let mut r = seeded(seed);
    let mean = Vector::from_element(d, 0.5 * separation / (d as f64).sqrt());
    let (train, labels) = two_gaussian_rows(&mut r, m, &mean);
    let (test, test_labels) = two_gaussian_rows(&mut r, m_test, &mean);
    let labeled = ((label_fraction * m as f64).ceil() as usize).clamp(1, m);
    Ok(SslrData { train, labels: labels[..labeled].to_vec(), labeled, test, test_labels })
}

fn check_labels(labels: &[f64]) -> Result<()> {
    match labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
        Some(y) => Err(AppError::Invalid(format!("label {y} is not +-1"))),
        None => Ok(()),
    }
}

/// `h = sum_{i<l} log(1 + exp(-b_i w_i)) + gamma sum_{i>=l} log(1 + exp(-|w_i|))`,
/// `g = lambda/2 ||x||^2`, `A` = features.
pub fn sslr_setup(features: &Matrix, labels: &[f64], lambda: f64, gamma: f64, nu: f64) -> Result<RelaxedProblem> {
    let m = features.nrows();
    if labels.len() > m {
        return Err(AppError::Invalid(format!("{} labels for {m} rows", labels.len())));
    }
    check_labels(labels)?;
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(AppError::Invalid(format!("gamma {gamma}")));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(AppError::Invalid(format!("lambda {lambda}")));
    }
    let terms = (0..m)
        .map(|i| match labels.get(i) {
            Some(&label) => Term::Scalar { index: i, kind: ScalarProxKind::Logistic { label }, weight: 1.0 },
            None => Term::Scalar { index: i, kind: ScalarProxKind::SymmetricLogistic, weight: gamma },
        })
        .collect();
    let h = SeparableNonsmooth::new(m, terms)?;
    let g = if lambda > 0.0 { QuadraticRegularizer::Ridge(lambda) } else { QuadraticRegularizer::Zero };
    Ok(RelaxedProblem::new(h, LinearOperator::dense(features.clone()), g, nu, LsSolvePolicy::default())?)
}

/// Fits the supervised problem (`gamma = 0`) from `w = 0`, then the
/// semi-supervised one warm-started at `w = A x_sup`.
pub fn fit_sslr(data: &SslrData, lambda: f64, gamma: f64, nu: f64, opts: &SolveOptions) -> Result<SolveResult> {
    let sup = sslr_setup(&data.train, &data.labels, lambda, 0.0, nu)?;
    let first = rs_pgd(&sup, &Vector::zeros(data.train.nrows()), opts)?;
    if gamma == 0.0 {
        return Ok(first);
    }
    let p = sslr_setup(&data.train, &data.labels, lambda, gamma, nu)?;
    let w0 = &data.train * &first.x;
    Ok(rs_pgd(&p, &w0, opts)?)
}

/// Fraction of rows with `sign(<a_i, x>) = label_i`, taking `sign(0) = +1`.
pub fn sslr_accuracy(x: &Vector, features: &Matrix, labels: &[f64]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let z = features * x;
    let hits = labels.iter().zip(z.iter()).filter(|(&y, &s)| (if s >= 0.0 { 1.0 } else { -1.0 }) == y).count();
    hits as f64 / labels.len() as f64
}
