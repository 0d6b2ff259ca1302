//! Real phase retrieval from `b = |A x|` with a sign-diagonal Hadamard stack.

use rand::Rng;
use rand_distr::StandardNormal;
use rsplit::prox::{project_capped_simplex, ScalarProxKind};
use rsplit::solvers::{rs_pgd, trs_bcd, SolveResult, TrimmedProblem, TrsResult};
use rsplit::{LinearOperator, LsSolvePolicy, OperatorKind, QuadraticRegularizer, RelaxedProblem, SeparableNonsmooth, SolveOptions, Vector};

use crate::{seeded, AppError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRetrievalInstance {
    pub n: usize,
    pub k: usize,
    pub signs: Vec<Vec<f64>>,
    pub x_true: Option<Vector>,
    pub b: Vector,
}

impl PhaseRetrievalInstance {
    pub fn m(&self) -> usize {
        self.n * self.k
    }

    /// `[H S_1; ...; H S_k]`. Each call builds an operator with its own
    /// transform counter.
    pub fn operator(&self) -> LinearOperator {
        LinearOperator::hadamard_stack(self.n, self.signs.clone()).expect("instance signs are validated")
    }
}

/// Draws `k` sign diagonals from `seed` and measures `b = |A x_true|`.
pub fn phase_instance(x_true: &Vector, k: usize, seed: u64) -> Result<PhaseRetrievalInstance> {
    let n = x_true.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(AppError::Invalid(format!("signal length {n} is not a power of two")));
    }
    if k == 0 {
        return Err(AppError::Invalid("k must be positive".into()));
    }
    let mut r = seeded(seed);
    let signs: Vec<Vec<f64>> =
        (0..k).map(|_| (0..n).map(|_| if r.random::<bool>() { 1.0 } else { -1.0 }).collect()).collect();
    let op = LinearOperator::hadamard_stack(n, signs.clone())?;
    let b = op.apply(x_true)?.abs();
    Ok(PhaseRetrievalInstance { n, k, signs, x_true: Some(x_true.clone()), b })
}

/// `h = sum_i ||w_i| - b_i|`, `g = 0`.
pub fn phase_problem(inst: &PhaseRetrievalInstance, nu: f64) -> Result<RelaxedProblem> {
    let h = SeparableNonsmooth::scalar(inst.b.iter().map(|&b| ScalarProxKind::ModulusDeviation { b }).collect(), 1.0)?;
    Ok(RelaxedProblem::new(h, inst.operator(), QuadraticRegularizer::Zero, nu, LsSolvePolicy::default())?)
}

/// [`phase_instance`] followed by [`phase_problem`].
pub fn phase_setup(x_true: &Vector, k: usize, seed: u64, nu: f64) -> Result<(PhaseRetrievalInstance, RelaxedProblem)> {
    let inst = phase_instance(x_true, k, seed)?;
    let p = phase_problem(&inst, nu)?;
    Ok((inst, p))
}

/// Standard Gaussian signal of length `n`.
pub fn gaussian_signal(n: usize, seed: u64) -> Vector {
    let mut r = seeded(seed);
    Vector::from_fn(n, |_, _| r.sample(StandardNormal))
}

/// Power iteration on `M - shift I` with `M = A^T diag(weights) A`, from a
/// seeded Gaussian start, scaled so that `||A x0|| = ||b||`.
pub fn spectral_init_shifted(op: &LinearOperator, b: &Vector, weights: &Vector, shift: f64, iters: usize, seed: u64) -> Result<Vector> {
    if iters == 0 {
        return Err(AppError::Invalid("spectral init needs at least one iteration".into()));
    }
    if b.len() != op.rows() || weights.len() != op.rows() {
        return Err(AppError::Invalid("measurement length differs from operator rows".into()));
    }
    let mut r = seeded(seed);
    let mut x = Vector::from_fn(op.cols(), |_, _| r.sample(StandardNormal));
    for _ in 0..iters {
        let y = op.apply(&x)?.component_mul(weights);
        x = op.adjoint(&y)? - &x * shift;
        let nx = x.norm();
        if nx == 0.0 {
            return Err(AppError::Invalid("spectral matrix annihilated the iterate".into()));
        }
        x /= nx;
    }
    let ax = op.apply(&x)?.norm();
    Ok(x * (b.norm() / ax))
}

/// Leading eigenvector estimate of `A^T diag(weights) A`. When `A^T A = k I`
/// the iteration runs on `M - mean(weights) k I`, which has the same
/// eigenvectors but a wider relative gap at the top.
pub fn spectral_init_weighted(op: &LinearOperator, b: &Vector, weights: &Vector, iters: usize, seed: u64) -> Result<Vector> {
    let k = match op.kind() {
        OperatorKind::HadamardStack { signs, .. } => signs.len() as f64,
        OperatorKind::Identity(_) => 1.0,
        _ => 0.0,
    };
    let shift = if weights.is_empty() { 0.0 } else { k * weights.mean() };
    spectral_init_shifted(op, b, weights, shift, iters, seed)
}

/// Spectral initialization with weights `b^2`.
pub fn spectral_init_op(op: &LinearOperator, b: &Vector, iters: usize, seed: u64) -> Result<Vector> {
    spectral_init_weighted(op, b, &b.map(|v| v * v), iters, seed)
}

pub fn spectral_init(inst: &PhaseRetrievalInstance, iters: usize, seed: u64) -> Result<Vector> {
    spectral_init_op(&inst.operator(), &inst.b, iters, seed)
}

/// Spectral initialization that ignores all but the `keep` smallest
/// measurements, for data with gross upward corruption.
pub fn truncated_spectral_init(inst: &PhaseRetrievalInstance, keep: usize, iters: usize, seed: u64) -> Result<Vector> {
    let m = inst.m();
    let keep = keep.min(m);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| inst.b[i].total_cmp(&inst.b[j]).then(i.cmp(&j)));
    let mut weights = Vector::zeros(m);
    let mut kept = Vector::zeros(m);
    for &i in &order[..keep] {
        weights[i] = inst.b[i] * inst.b[i];
        kept[i] = inst.b[i];
    }
    spectral_init_weighted(&inst.operator(), &kept, &weights, iters, seed)
}

/// `min(||x - x*||, ||x + x*||) / ||x*||`.
pub fn phase_error(x: &Vector, x_true: &Vector) -> Result<f64> {
    if x.len() != x_true.len() {
        return Err(AppError::Invalid("signal lengths differ".into()));
    }
    let nt = x_true.norm();
    if nt == 0.0 {
        return Err(AppError::Invalid("true signal is zero".into()));
    }
    Ok((x - x_true).norm().min((x + x_true).norm()) / nt)
}

/// Replaces `floor(fraction m)` seeded-random measurements with `value`;
/// returns the new instance and the sorted corrupted indices.
pub fn corrupt_measurements(
    inst: &PhaseRetrievalInstance,
    fraction: f64,
    value: f64,
    seed: u64,
) -> Result<(PhaseRetrievalInstance, Vec<usize>)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(AppError::Invalid(format!("corruption fraction {fraction}")));
    }
    let m = inst.m();
    let count = (fraction * m as f64).floor() as usize;
    let mut r = seeded(seed);
    let mut idx: Vec<usize> = (0..m).collect();
    // partial Fisher-Yates
    for i in 0..count {
        let j = r.random_range(i..m);
        idx.swap(i, j);
    }
    let mut chosen = idx[..count].to_vec();
    chosen.sort_unstable();
    let mut out = inst.clone();
    for &i in &chosen {
        out.b[i] = value;
    }
    Ok((out, chosen))
}

/// Algorithm-1 run from `x0` (`w0 = A x0`).
pub fn phase_solve(p: &RelaxedProblem, x0: &Vector, opts: &SolveOptions) -> Result<SolveResult> {
    let w0 = p.op().apply(x0)?;
    Ok(rs_pgd(p, &w0, opts)?)
}

/// Trimmed relaxation `(1/2) sum v_i (|w_i| - b_i)^2 + 1/(2 nu)||Ax - w||^2`
/// over `v` in the capped simplex of budget `tau`, from `x0`. The starting
/// weights are one projected step from uniform at `w0 = A x0`.
pub fn trimmed_phase(
    inst: &PhaseRetrievalInstance,
    nu: f64,
    tau: f64,
    gamma: f64,
    x0: &Vector,
    opts: &SolveOptions,
) -> Result<TrsResult> {
    let h = SeparableNonsmooth::scalar(
        inst.b.iter().map(|&b| ScalarProxKind::SquaredModulusDeviation { b }).collect(),
        1.0,
    )?;
    let base = RelaxedProblem::new(h, inst.operator(), QuadraticRegularizer::Zero, nu, LsSolvePolicy::default())?;
    let w0 = base.op().apply(x0)?;
    let tp = TrimmedProblem::new(base, tau, gamma)?;
    // one weight step before the first w-step, so gross outliers start at
    // weight zero instead of dragging w toward them
    let h0 = tp.base().h().coordinate_values(&w0)?;
    let v0 = project_capped_simplex(&(tp.default_weights() - h0 * gamma), tau)?;
    Ok(trs_bcd(&tp, &w0, &v0, opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_basis_vector_gives_constant_measurements() {
        let mut x = Vector::zeros(16);
        x[0] = 3.0;
        let inst = phase_instance(&x, 2, 1).unwrap();
        for &b in inst.b.iter() {
            assert!((b - 3.0 / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn objective_zero_at_truth() {
        let x = gaussian_signal(32, 4);
        let (_, p) = phase_setup(&x, 4, 2, 1.0).unwrap();
        let w = p.op().apply(&x).unwrap();
        assert!(p.objective(&w, &x).unwrap() < 1e-12);
    }

    #[test]
    fn seeds_change_signs() {
        let x = gaussian_signal(8, 0);
        assert_ne!(phase_instance(&x, 2, 1).unwrap().signs, phase_instance(&x, 2, 2).unwrap().signs);
        assert!(phase_instance(&Vector::zeros(12), 2, 1).is_err());
    }

    #[test]
    fn phase_error_examples() {
        let x = gaussian_signal(8, 1);
        assert_eq!(phase_error(&x, &x).unwrap(), 0.0);
        assert_eq!(phase_error(&-&x, &x).unwrap(), 0.0);
        assert_eq!(phase_error(&Vector::zeros(8), &x).unwrap(), 1.0);
        assert!((phase_error(&(&x * 1.1), &x).unwrap() - 0.1).abs() < 1e-12);
        assert!(phase_error(&x, &Vector::zeros(8)).is_err());
    }

    #[test]
    fn rank_one_spectral_matrix_converges_in_one_step() {
        let x = gaussian_signal(16, 3);
        let inst = phase_instance(&x, 1, 5).unwrap();
        let op = inst.operator();
        let mut b = Vector::zeros(16);
        b[3] = 2.0;
        let x0 = spectral_init_shifted(&op, &b, &b.map(|v| v * v), 0.0, 1, 9).unwrap();
        let mut e = Vector::zeros(16);
        e[3] = 1.0;
        let a3 = op.adjoint(&e).unwrap();
        let cos = x0.dot(&a3).abs() / (x0.norm() * a3.norm());
        assert!((cos - 1.0).abs() < 1e-12);
        assert!((op.apply(&x0).unwrap().norm() - b.norm()).abs() < 1e-10);
    }

    #[test]
    fn corruption_count_and_value() {
        let x = gaussian_signal(16, 3);
        let inst = phase_instance(&x, 4, 5).unwrap();
        let (c, idx) = corrupt_measurements(&inst, 0.3, 1000.0, 1).unwrap();
        assert_eq!(idx.len(), 19);
        assert!(idx.iter().all(|&i| c.b[i] == 1000.0));
        assert_eq!(c.b.iter().filter(|&&v| v == 1000.0).count(), 19);
    }
}
