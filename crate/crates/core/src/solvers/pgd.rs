use super::{Recorder, SolveOptions, SolveResult};
use crate::error::{check_dim, Error};
use crate::prox::prox_separable;
use crate::relax::RelaxedProblem;
use crate::Vector;

/// Objective and gap at `(w, x)` given the cached `ax = A x`.
pub(crate) fn eval_at(p: &RelaxedProblem, w: &Vector, x: &Vector, ax: &Vector) -> (f64, f64) {
    let r = ax - w;
    let gap_sq = r.norm_squared();
    (p.h().value(w) + gap_sq / (2.0 * p.nu()) + p.g().value(x), gap_sq.sqrt())
}

/// Proximal gradient on `p_nu` with step `nu`:
/// `w <- prox_{nu h}(A x_nu(w))`.
///
/// The optimality column is `||A (x_prev - x) / nu||^2`.
pub fn rs_pgd(p: &RelaxedProblem, w0: &Vector, opts: &SolveOptions) -> Result<SolveResult, Error> {
    check_dim("w0", p.rows(), w0.len())?;
    let nu = p.nu();
    let mut rec = Recorder::new(opts, nu)?;
    let mut w = w0.clone();
    let (mut x, inner) = p.partial_minimize_counted(&w).map_err(Error::at(0))?;
    let mut ax = p.op().apply(&x)?;
    let (obj, gap) = eval_at(p, &w, &x, &ax);
    rec.record(0, obj, f64::NAN, gap, inner);
    let mut k = 0;
    let stop = loop {
        k += 1;
        let w_new = prox_separable(p.h(), &ax, nu, None).map_err(|e| Error::at(k)(e.into()))?;
        let (x_new, inner) = p.partial_minimize_counted(&w_new).map_err(Error::at(k))?;
        let ax_new = p.op().apply(&x_new)?;
        let witness = (&ax - &ax_new).norm_squared() / (nu * nu);
        let (obj, gap) = eval_at(p, &w_new, &x_new, &ax_new);
        w = w_new;
        x = x_new;
        ax = ax_new;
        if let Some(s) = rec.record(k, obj, witness, gap, inner) {
            break s;
        }
    };
    let (trace, summary) = rec.finish(stop);
    Ok(SolveResult { w, x, trace, summary, stop })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::StopReason;
    use crate::linops::{LinearOperator, LsSolvePolicy, QuadraticRegularizer};
    use crate::prox::SeparableNonsmooth;

    #[test]
    fn fixed_point_stops_after_one_iteration() {
        let b = [1.0, -2.0, 0.5];
        let h = SeparableNonsmooth::l1_deviation(&b).unwrap();
        let p = RelaxedProblem::new(h, LinearOperator::identity(3), QuadraticRegularizer::Zero, 1.0, LsSolvePolicy::default())
            .unwrap();
        let r = rs_pgd(&p, &Vector::from_row_slice(&b), &SolveOptions::default()).unwrap();
        assert_eq!(r.summary.iterations, 1);
        assert_eq!(r.stop, StopReason::Optimality);
        assert_eq!(r.summary.final_objective, 0.0);
        assert_eq!(r.trace.len(), 2);
    }

    #[test]
    fn max_iter_reports_not_converged() {
        let h = SeparableNonsmooth::l1_deviation(&[5.0; 2]).unwrap();
        let p = RelaxedProblem::new(h, LinearOperator::identity(2), QuadraticRegularizer::Ridge(1.0), 0.1, LsSolvePolicy::default())
            .unwrap();
        let r = rs_pgd(&p, &Vector::zeros(2), &SolveOptions::default().with_max_iter(2).with_tol(0.0)).unwrap();
        assert!(!r.summary.converged);
        assert_eq!(r.summary.iterations, 2);
    }
}
