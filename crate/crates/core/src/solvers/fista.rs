use super::pgd::eval_at;
use super::{Recorder, SolveOptions, SolveResult};
use crate::error::{check_dim, Error};
use crate::prox::prox_separable;
use crate::relax::RelaxedProblem;
use crate::Vector;

/// Accelerated proximal gradient on `p_nu` with the standard
/// `(t_k - 1) / t_{k+1}` extrapolation.
///
/// Rows record `p_nu(w^k)` at the prox outputs; the witness compares
/// `x_nu(w^{k-1})` with `x_nu(w^k)`, costing a second inner solve per step.
/// Convexity of `h` is what the rate guarantee needs; a nonconvex plan
/// runs with a warning.
pub fn rs_fista(p: &RelaxedProblem, w0: &Vector, opts: &SolveOptions) -> Result<SolveResult, Error> {
    check_dim("w0", p.rows(), w0.len())?;
    if !p.h().is_convex() {
        log::warn!("FISTA on a nonconvex nonsmooth term carries no rate guarantee");
    }
    let nu = p.nu();
    let mut rec = Recorder::new(opts, nu)?;
    let mut w = w0.clone();
    let (mut x, inner) = p.partial_minimize_counted(&w).map_err(Error::at(0))?;
    let mut ax = p.op().apply(&x)?;
    let (obj, gap) = eval_at(p, &w, &x, &ax);
    rec.record(0, obj, f64::NAN, gap, inner);
    // extrapolated point and its A x_nu
    let mut ay = ax.clone();
    let mut t = 1.0_f64;
    let mut k = 0;
    let stop = loop {
        k += 1;
        let w_new = prox_separable(p.h(), &ay, nu, None).map_err(|e| Error::at(k)(e.into()))?;
        let (x_new, inner_w) = p.partial_minimize_counted(&w_new).map_err(Error::at(k))?;
        let ax_new = p.op().apply(&x_new)?;
        let witness = (&ax - &ax_new).norm_squared() / (nu * nu);
        let (obj, gap) = eval_at(p, &w_new, &x_new, &ax_new);
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_new;
        let y = &w_new + (&w_new - &w) * beta;
        let mut inner_y = 0;
        ay = if beta == 0.0 {
            ax_new.clone()
        } else {
            let (xy, it) = p.partial_minimize_counted(&y).map_err(Error::at(k))?;
            inner_y = it;
            p.op().apply(&xy)?
        };
        t = t_new;
        w = w_new;
        x = x_new;
        ax = ax_new;
        if let Some(s) = rec.record(k, obj, witness, gap, inner_w + inner_y) {
            break s;
        }
    };
    let (trace, summary) = rec.finish(stop);
    Ok(SolveResult { w, x, trace, summary, stop })
}
