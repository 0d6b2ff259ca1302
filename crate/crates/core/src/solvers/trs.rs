use super::{Recorder, RunSummary, SolveOptions, StopReason};
use crate::error::{check_dim, Error};
use crate::prox::{project_capped_simplex, prox_separable};
use crate::relax::{RelaxedProblem, SolverTrace};
use crate::Vector;

/// Relaxed problem with trimming weights `v` on the capped simplex of
/// budget `tau`, objective `<v, H(w)> + g_nu(w)`.
#[derive(Debug, Clone)]
pub struct TrimmedProblem {
    base: RelaxedProblem,
    tau: f64,
    gamma: f64,
}

impl TrimmedProblem {
    pub fn new(base: RelaxedProblem, tau: f64, gamma: f64) -> Result<Self, Error> {
        if !base.h().is_coordinate_separable() {
            return Err(Error::NotSupported("trimming needs a coordinate-separable plan".into()));
        }
        let m = base.rows() as f64;
        if !(tau > 0.0 && tau <= m) {
            return Err(Error::BadParameter(format!("tau {tau} outside (0, {m}]")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::BadParameter(format!("gamma {gamma}")));
        }
        Ok(TrimmedProblem { base, tau, gamma })
    }

    pub fn base(&self) -> &RelaxedProblem {
        &self.base
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Uniform `tau / m` weights.
    pub fn default_weights(&self) -> Vector {
        let m = self.base.rows();
        Vector::from_element(m, self.tau / m as f64)
    }

    /// `<v, H(w)> + g(x) + 1/(2 nu) ||Ax - w||^2`.
    pub fn objective(&self, w: &Vector, v: &Vector, x: &Vector) -> Result<f64, Error> {
        Ok(self.base.h().weighted_value(w, v)? + self.base.coupling_value(w, x)?)
    }

    fn check_weights(&self, v: &Vector) -> Result<(), Error> {
        check_dim("v0", self.base.rows(), v.len())?;
        let in_box = v.iter().all(|&x| (0.0..=1.0).contains(&x));
        let slack = 1e-9 * (1.0 + self.tau);
        if !in_box || (v.sum() - self.tau).abs() > slack {
            return Err(Error::BadParameter("v0 is not in the capped simplex".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrsResult {
    pub w: Vector,
    pub v: Vector,
    pub x: Vector,
    pub trace: SolverTrace,
    pub summary: RunSummary,
    pub stop: StopReason,
}

/// Block-coordinate descent on `(w, v)`:
/// a weighted prox step in `w`, then a projected gradient step in `v`.
///
/// The optimality column is `(1/(2 nu)) ||A dx||^2 + (1/gamma) ||dv||^2`,
/// which the objective decrease bounds at every step.
pub fn trs_bcd(tp: &TrimmedProblem, w0: &Vector, v0: &Vector, opts: &SolveOptions) -> Result<TrsResult, Error> {
    let p = &tp.base;
    check_dim("w0", p.rows(), w0.len())?;
    tp.check_weights(v0)?;
    let nu = p.nu();
    let mut rec = Recorder::new(opts, nu)?;
    let mut w = w0.clone();
    let mut v = v0.clone();
    let (mut x, inner) = p.partial_minimize_counted(&w).map_err(Error::at(0))?;
    let mut ax = p.op().apply(&x)?;
    let eval = |w: &Vector, v: &Vector, x: &Vector, ax: &Vector| -> Result<(f64, f64), Error> {
        let r = ax - w;
        let hv = p.h().weighted_value(w, v)?;
        Ok((hv + r.norm_squared() / (2.0 * nu) + p.g().value(x), r.norm()))
    };
    let (obj, gap) = eval(&w, &v, &x, &ax)?;
    rec.record(0, obj, f64::NAN, gap, inner);
    let mut k = 0;
    let stop = loop {
        k += 1;
        let w_new = prox_separable(p.h(), &ax, nu, Some(&v)).map_err(|e| Error::at(k)(e.into()))?;
        let (x_new, inner) = p.partial_minimize_counted(&w_new).map_err(Error::at(k))?;
        let ax_new = p.op().apply(&x_new)?;
        let hw = p.h().coordinate_values(&w_new)?;
        let v_new = project_capped_simplex(&(&v - hw * tp.gamma), tp.tau).map_err(|e| Error::at(k)(e.into()))?;
        let witness = (&ax - &ax_new).norm_squared() / (2.0 * nu) + (&v - &v_new).norm_squared() / tp.gamma;
        let (obj, gap) = eval(&w_new, &v_new, &x_new, &ax_new)?;
        w = w_new;
        v = v_new;
        x = x_new;
        ax = ax_new;
        if let Some(s) = rec.record(k, obj, witness, gap, inner) {
            break s;
        }
    };
    let (trace, summary) = rec.finish(stop);
    Ok(TrsResult { w, v, x, trace, summary, stop })
}
