use std::sync::Arc;

use nalgebra::Cholesky;

use super::{check_len, LinearOperator, LinopError, OperatorKind};
use crate::Vector;

/// Convex quadratic `g(x)` for the partial minimization.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadraticRegularizer {
    Zero,
    /// `(lambda/2) ||x||^2`
    Ridge(f64),
    /// `(1/2) ||x - u||^2`
    Tracking(Vector),
}

impl QuadraticRegularizer {
    /// Curvature `c` in `g(x) = (c/2) ||x - u||^2`.
    pub fn curvature(&self) -> f64 {
        match self {
            QuadraticRegularizer::Zero => 0.0,
            QuadraticRegularizer::Ridge(l) => *l,
            QuadraticRegularizer::Tracking(_) => 1.0,
        }
    }

    pub fn reference(&self) -> Option<&Vector> {
        match self {
            QuadraticRegularizer::Tracking(u) => Some(u),
            _ => None,
        }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        match self {
            QuadraticRegularizer::Zero => 0.0,
            QuadraticRegularizer::Ridge(l) => 0.5 * l * x.norm_squared(),
            QuadraticRegularizer::Tracking(u) => 0.5 * (x - u).norm_squared(),
        }
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        match self {
            QuadraticRegularizer::Zero => Vector::zeros(x.len()),
            QuadraticRegularizer::Ridge(l) => x * *l,
            QuadraticRegularizer::Tracking(u) => x - u,
        }
    }

    fn validate(&self, cols: usize) -> Result<(), LinopError> {
        match self {
            QuadraticRegularizer::Ridge(l) if !(l.is_finite() && *l >= 0.0) => {
                Err(LinopError::BadParameter(format!("ridge weight must be finite and >= 0, got {l}")))
            }
            QuadraticRegularizer::Tracking(u) => check_len("tracking reference", cols, u.len()),
            _ => Ok(()),
        }
    }
}

/// How the normal equations `(A^T A + nu c I) x = A^T w + nu c u` are solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LsMethod {
    /// Closed form where the operator structure allows it, otherwise a
    /// Cholesky factorization of the normal matrix.
    Auto,
    DirectFactor,
    /// Jacobi-preconditioned CG; `tol` bounds `||A^T(Ax - w)/nu + grad g(x)||`.
    ConjugateGradient { tol: f64, max_iter: usize },
    /// Damped LSQR with the same stopping quantity as CG.
    LsqrLike { tol: f64, max_iter: usize },
    /// Uses `A^T A = k I`; only for identity and Hadamard stacks.
    OrthogonalClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsSolvePolicy {
    pub method: LsMethod,
}

impl Default for LsSolvePolicy {
    fn default() -> Self {
        LsSolvePolicy { method: LsMethod::Auto }
    }
}

impl LsSolvePolicy {
    pub fn new(method: LsMethod) -> Self {
        LsSolvePolicy { method }
    }

    pub fn name(&self) -> &'static str {
        match self.method {
            LsMethod::Auto => "auto",
            LsMethod::DirectFactor => "direct",
            LsMethod::ConjugateGradient { .. } => "cg",
            LsMethod::LsqrLike { .. } => "lsqr",
            LsMethod::OrthogonalClosedForm => "orthogonal",
        }
    }
}

#[derive(Debug, Clone)]
enum Engine {
    /// `A^T A = k I`.
    Orthogonal { k: f64 },
    /// Complete-graph Laplacian per feature, inverted by a rank-one correction.
    Pairwise { points: usize, dim: usize },
    Factor(Cholesky<f64, nalgebra::Dyn>),
    Cg { tol: f64, max_iter: usize, diag: Vector },
    Lsqr { tol: f64, max_iter: usize },
}

/// Partial-minimization engine prepared for a fixed `(A, g, nu)`.
///
/// Any factorization is built once here; a new `nu` or regularizer needs a
/// new solver.
#[derive(Debug, Clone)]
pub struct PartialSolver {
    op: Arc<LinearOperator>,
    curvature: f64,
    reference: Option<Vector>,
    nu: f64,
    engine: Engine,
    rank_deficient: bool,
}

const RANK_TOL: f64 = 1e-12;

impl PartialSolver {
    pub fn new(
        op: Arc<LinearOperator>,
        g: &QuadraticRegularizer,
        nu: f64,
        policy: LsSolvePolicy,
    ) -> Result<Self, LinopError> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(LinopError::BadParameter(format!("nu must be positive, got {nu}")));
        }
        g.validate(op.cols())?;
        let curvature = g.curvature();
        let shift = nu * curvature;
        let mut rank_deficient = false;
        let orthogonal_k = match op.kind() {
            OperatorKind::Identity(_) => Some(1.0),
            OperatorKind::HadamardStack { signs, .. } => Some(signs.len() as f64),
            _ => None,
        };
        let engine = match policy.method {
            LsMethod::OrthogonalClosedForm => match orthogonal_k {
                Some(k) => Engine::Orthogonal { k },
                None => {
                    return Err(LinopError::PolicyMismatch { policy: "orthogonal", kind: op.kind_name() });
                }
            },
            LsMethod::Auto if orthogonal_k.is_some() => Engine::Orthogonal { k: orthogonal_k.unwrap() },
            LsMethod::Auto if matches!(op.kind(), OperatorKind::PairwiseDifference { .. }) => {
                let OperatorKind::PairwiseDifference { points, dim } = *op.kind() else { unreachable!() };
                Engine::Pairwise { points, dim }
            }
            LsMethod::Auto | LsMethod::DirectFactor => {
                let mut normal = op.gram();
                for i in 0..normal.nrows() {
                    normal[(i, i)] += shift;
                }
                let scale = normal.diagonal().max().max(f64::MIN_POSITIVE);
                match normal.cholesky() {
                    Some(chol) if min_pivot_ratio(&chol, scale) > RANK_TOL => Engine::Factor(chol),
                    _ => {
                        log::warn!(
                            "normal matrix of {} operator is singular; falling back to minimum-norm CG",
                            op.kind_name()
                        );
                        rank_deficient = true;
                        Engine::Cg { tol: 1e-13 * scale.sqrt(), max_iter: 20 * op.cols().max(10), diag: Vector::from_element(op.cols(), 1.0) }
                    }
                }
            }
            LsMethod::ConjugateGradient { tol, max_iter } => {
                check_iterative(tol, max_iter)?;
                let mut diag = op.column_norms_sq();
                diag.add_scalar_mut(shift);
                diag.apply(|d| {
                    if *d <= 0.0 {
                        *d = 1.0
                    }
                });
                Engine::Cg { tol, max_iter, diag }
            }
            LsMethod::LsqrLike { tol, max_iter } => {
                check_iterative(tol, max_iter)?;
                Engine::Lsqr { tol, max_iter }
            }
        };
        Ok(PartialSolver { op, curvature, reference: g.reference().cloned(), nu, engine, rank_deficient })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn operator(&self) -> &LinearOperator {
        &self.op
    }

    /// True when a direct factorization was requested but the normal
    /// matrix was singular and the minimum-norm iterative fallback is used.
    pub fn rank_deficient(&self) -> bool {
        self.rank_deficient
    }

    /// Returns `x` minimizing `g(x) + 1/(2 nu) ||Ax - w||^2` and the number of
    /// inner iterations spent (0 for direct engines).
    pub fn solve(&self, w: &Vector) -> Result<(Vector, usize), LinopError> {
        check_len("partial minimization target", self.op.rows(), w.len())?;
        let shift = self.nu * self.curvature;
        let mut rhs = self.op.adjoint_unchecked(w);
        if let Some(u) = &self.reference {
            rhs.axpy(shift, u, 1.0);
        }
        let (x, iters) = match &self.engine {
            Engine::Orthogonal { k } => (rhs / (k + shift), 0),
            Engine::Pairwise { points, dim } => (pairwise_solve(&rhs, *points, *dim, shift), 0),
            Engine::Factor(chol) => (chol.solve(&rhs), 0),
            Engine::Cg { tol, max_iter, diag } => {
                self.cg(&rhs, shift, *tol * if self.rank_deficient { 1.0 } else { self.nu }, *max_iter, diag)
            }
            Engine::Lsqr { tol, max_iter } => self.lsqr(w, shift, *tol * self.nu, *max_iter),
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(LinopError::NonFinite);
        }
        Ok((x, iters))
    }

    fn normal_apply(&self, x: &Vector, shift: f64) -> Vector {
        let mut y = self.op.adjoint_unchecked(&self.op.apply_unchecked(x));
        y.axpy(shift, x, 1.0);
        y
    }

    fn cg(&self, rhs: &Vector, shift: f64, tol: f64, max_iter: usize, diag: &Vector) -> (Vector, usize) {
        let n = rhs.len();
        let mut x = Vector::zeros(n);
        let mut r = rhs.clone();
        if r.norm() <= tol {
            return (x, 0);
        }
        let mut z = r.component_div(diag);
        let mut p = z.clone();
        let mut rz = r.dot(&z);
        for it in 1..=max_iter {
            let q = self.normal_apply(&p, shift);
            let pq = p.dot(&q);
            if pq <= 0.0 {
                return (x, it);
            }
            let alpha = rz / pq;
            x.axpy(alpha, &p, 1.0);
            r.axpy(-alpha, &q, 1.0);
            if r.norm() <= tol {
                return (x, it);
            }
            z = r.component_div(diag);
            let rz_new = r.dot(&z);
            let beta = rz_new / rz;
            rz = rz_new;
            p = &z + p * beta;
        }
        (x, max_iter)
    }

    /// Damped LSQR on `min ||A y - (w - A u)||^2 + shift ||y||^2`, `x = u + y`.
    fn lsqr(&self, w: &Vector, shift: f64, tol: f64, max_iter: usize) -> (Vector, usize) {
        let op = &self.op;
        let damp = shift.sqrt();
        let mut u = match &self.reference {
            Some(r) => w - op.apply_unchecked(r),
            None => w.clone(),
        };
        let mut x = Vector::zeros(op.cols());
        let mut beta = u.norm();
        if beta > 0.0 {
            u /= beta;
        }
        let mut v = op.adjoint_unchecked(&u);
        let mut alpha = v.norm();
        if alpha > 0.0 {
            v /= alpha;
        }
        let mut iters = 0;
        if alpha * beta > tol {
            let mut wk = v.clone();
            let mut phibar = beta;
            let mut rhobar = alpha;
            for it in 1..=max_iter {
                iters = it;
                u = op.apply_unchecked(&v) - &u * alpha;
                beta = u.norm();
                if beta > 0.0 {
                    u /= beta;
                    v = op.adjoint_unchecked(&u) - &v * beta;
                    alpha = v.norm();
                    if alpha > 0.0 {
                        v /= alpha;
                    }
                }
                let rhobar1 = (rhobar * rhobar + damp * damp).sqrt();
                let cs1 = rhobar / rhobar1;
                phibar *= cs1;
                let rho = (rhobar1 * rhobar1 + beta * beta).sqrt();
                let cs = rhobar1 / rho;
                let sn = beta / rho;
                let theta = sn * alpha;
                rhobar = -cs * alpha;
                let phi = cs * phibar;
                phibar *= sn;
                x.axpy(phi / rho, &wk, 1.0);
                wk = &v - wk * (theta / rho);
                let arnorm = alpha * (sn * phi).abs();
                if arnorm <= tol || beta == 0.0 {
                    break;
                }
            }
        }
        if let Some(r) = &self.reference {
            x += r;
        }
        (x, iters)
    }
}

fn check_iterative(tol: f64, max_iter: usize) -> Result<(), LinopError> {
    if !(tol.is_finite() && tol > 0.0) || max_iter == 0 {
        return Err(LinopError::BadParameter("iterative solves need tol > 0 and max_iter >= 1".into()));
    }
    Ok(())
}

fn min_pivot_ratio(chol: &Cholesky<f64, nalgebra::Dyn>, scale: f64) -> f64 {
    let l = chol.l_dirty();
    let min = (0..l.nrows()).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
    min / scale
}

/// Solves `((P I - J) (x) I_d + s I) x = r` per feature. For `s = 0` the
/// minimum-norm solution is returned.
fn pairwise_solve(rhs: &Vector, points: usize, dim: usize, shift: f64) -> Vector {
    let p = points as f64;
    let mut x = Vector::zeros(rhs.len());
    for a in 0..dim {
        let total: f64 = (0..points).map(|i| rhs[i * dim + a]).sum();
        for i in 0..points {
            let r = rhs[i * dim + a];
            x[i * dim + a] = if shift > 0.0 {
                (r + total / shift) / (p + shift)
            } else {
                (r - total / p) / p
            };
        }
    }
    x
}

/// One-shot partial minimization; prefer [`PartialSolver`] inside loops.
pub fn solve_partial(
    op: &LinearOperator,
    g: &QuadraticRegularizer,
    w: &Vector,
    nu: f64,
    policy: LsSolvePolicy,
) -> Result<Vector, LinopError> {
    let solver = PartialSolver::new(Arc::new(op.clone()), g, nu, policy)?;
    Ok(solver.solve(w)?.0)
}

/// `(I - P_A) w`, the component of `w` orthogonal to `range(A)`.
pub fn projection_residual(op: &LinearOperator, w: &Vector) -> Result<Vector, LinopError> {
    let x = solve_partial(op, &QuadraticRegularizer::Zero, w, 1.0, LsSolvePolicy::default())?;
    Ok(w - op.apply_unchecked(&x))
}
