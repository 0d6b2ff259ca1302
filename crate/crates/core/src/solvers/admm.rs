use std::sync::Arc;

use super::{Recorder, RunSummary, SolveOptions, StopReason};
use crate::error::{check_dim, Error};
use crate::linops::{LinearOperator, LsSolvePolicy, PartialSolver, QuadraticRegularizer};
use crate::prox::{prox_separable, SeparableNonsmooth};
use crate::relax::SolverTrace;
use crate::Vector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmmOptions {
    pub rho: f64,
    /// Dual step; `None` uses `rho`.
    pub alpha: Option<f64>,
    /// Run on a nonconvex plan instead of refusing it.
    pub allow_nonconvex: bool,
    pub policy: LsSolvePolicy,
}

impl AdmmOptions {
    pub fn new(rho: f64) -> Self {
        AdmmOptions { rho, alpha: None, allow_nonconvex: false, policy: LsSolvePolicy::default() }
    }
}

#[derive(Debug, Clone)]
pub struct AdmmResult {
    pub x: Vector,
    pub w: Vector,
    pub u: Vector,
    pub trace: SolverTrace,
    pub summary: RunSummary,
    pub stop: StopReason,
}

/// ADMM on `h(w) + g(x)` subject to `Ax = w` with multiplier `u`.
///
/// Rows record the original objective `h(Ax) + g(x)`, the dual movement
/// `rho ||A (x - x_prev)||` as the optimality column and the primal residual
/// `||Ax - w||` as the gap. The run stops when both are at most
/// `opts.tol_optimality`.
pub fn admm(
    h: &SeparableNonsmooth,
    op: Arc<LinearOperator>,
    g: &QuadraticRegularizer,
    x0: &Vector,
    admm_opts: &AdmmOptions,
    opts: &SolveOptions,
) -> Result<AdmmResult, Error> {
    check_dim("plan vs operator rows", op.rows(), h.len())?;
    check_dim("x0", op.cols(), x0.len())?;
    let rho = admm_opts.rho;
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::BadParameter(format!("rho {rho}")));
    }
    let alpha = admm_opts.alpha.unwrap_or(rho);
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::BadParameter(format!("alpha {alpha}")));
    }
    if !h.is_convex() {
        if !admm_opts.allow_nonconvex {
            return Err(Error::NotSupported("ADMM needs convex nonsmooth terms".into()));
        }
        log::warn!("running ADMM on a nonconvex nonsmooth term; no convergence guarantee");
    }
    let inner = PartialSolver::new(op.clone(), g, 1.0 / rho, admm_opts.policy)?;
    let tol = opts.tol_optimality;
    // both residuals are tested below instead of the witness alone
    let mut rec = Recorder::new(opts, 1.0 / rho)?.without_witness_stop();
    let mut x = x0.clone();
    let mut ax = op.apply(&x)?;
    let mut w = ax.clone();
    let mut u = Vector::zeros(op.rows());
    rec.record(0, h.value(&ax) + g.value(&x), f64::NAN, 0.0, 0);
    let mut k = 0;
    let stop = loop {
        k += 1;
        let target = &w + &u / rho;
        let (x_new, it) = inner.solve(&target).map_err(|e| Error::at(k)(e.into()))?;
        let ax_new = op.apply(&x_new)?;
        let w_new = prox_separable(h, &(&ax_new - &u / rho), 1.0 / rho, None).map_err(|e| Error::at(k)(e.into()))?;
        let r = &ax_new - &w_new;
        u -= &r * alpha;
        let primal = r.norm();
        let dual = rho * (&ax_new - &ax).norm();
        x = x_new;
        ax = ax_new;
        w = w_new;
        let obj = h.value(&ax) + g.value(&x);
        let reason = rec.record(k, obj, dual, primal, it);
        if primal <= tol && dual <= tol {
            break StopReason::Optimality;
        }
        if let Some(s @ (StopReason::ObjectiveStall | StopReason::MaxIter)) = reason {
            break s;
        }
    };
    let (trace, summary) = rec.finish(stop);
    Ok(AdmmResult { x, w, u, trace, summary, stop })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox::ScalarProxKind;

    #[test]
    fn identity_converges_to_b() {
        let b = [1.0, -0.5, 2.0];
        let h = SeparableNonsmooth::l1_deviation(&b).unwrap();
        let op = Arc::new(LinearOperator::identity(3));
        let opts = SolveOptions::default().with_tol(1e-10);
        let r = admm(&h, op, &QuadraticRegularizer::Zero, &Vector::zeros(3), &AdmmOptions::new(1.0), &opts).unwrap();
        assert!(r.summary.converged);
        assert!((&r.x - Vector::from_row_slice(&b)).norm() < 1e-8);
        assert!((&r.w - Vector::from_row_slice(&b)).norm() < 1e-8);
    }

    #[test]
    fn refuses_nonconvex_unless_allowed() {
        let h = SeparableNonsmooth::scalar(vec![ScalarProxKind::ModulusDeviation { b: 1.0 }], 1.0).unwrap();
        let op = Arc::new(LinearOperator::identity(1));
        let x0 = Vector::from_vec(vec![0.5]);
        let mut ao = AdmmOptions::new(1.0);
        assert!(admm(&h, op.clone(), &QuadraticRegularizer::Zero, &x0, &ao, &SolveOptions::default()).is_err());
        ao.allow_nonconvex = true;
        assert!(admm(&h, op, &QuadraticRegularizer::Zero, &x0, &ao, &SolveOptions::default().with_max_iter(10)).is_ok());
    }
}
