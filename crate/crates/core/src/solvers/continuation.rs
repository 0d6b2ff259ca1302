use super::{rs_pgd, RunSummary, SolveOptions};
use crate::error::{check_dim, Error};
use crate::relax::{RelaxedProblem, SolverTrace};
use crate::Vector;

/// Geometric schedule `nu0, nu0 f, nu0 f^2, ...` down to `nu_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationSchedule {
    pub nu0: f64,
    pub factor: f64,
    pub nu_min: f64,
    pub stage_opts: SolveOptions,
}

impl ContinuationSchedule {
    pub fn new(nu0: f64, factor: f64, nu_min: f64, stage_opts: SolveOptions) -> Result<Self, Error> {
        let s = ContinuationSchedule { nu0, factor, nu_min, stage_opts };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.nu_min > 0.0 && self.nu0.is_finite() && self.nu0 >= self.nu_min) {
            return Err(Error::BadParameter(format!("schedule needs nu0 >= nu_min > 0, got {} and {}", self.nu0, self.nu_min)));
        }
        if !(self.factor > 0.0 && self.factor < 1.0) {
            return Err(Error::BadParameter(format!("decay factor {} outside (0, 1)", self.factor)));
        }
        self.stage_opts.validate()
    }

    /// Stage values; the last is the smallest `nu0 f^j` not below `nu_min`
    /// (with a relative rounding allowance).
    pub fn stages(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut nu = self.nu0;
        while nu >= self.nu_min * (1.0 - 1e-12) {
            out.push(nu);
            nu *= self.factor;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Stage {
    pub nu: f64,
    pub trace: SolverTrace,
    pub summary: RunSummary,
}

#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub w: Vector,
    pub x: Vector,
    pub stages: Vec<Stage>,
}

impl ContinuationResult {
    pub fn final_nu(&self) -> f64 {
        self.stages.last().map_or(f64::NAN, |s| s.nu)
    }

    pub fn converged(&self) -> bool {
        self.stages.last().is_some_and(|s| s.summary.converged)
    }

    pub fn total_iterations(&self) -> usize {
        self.stages.iter().map(|s| s.summary.iterations).sum()
    }
}

/// Runs [`rs_pgd`] at each stage of `sched`, warm-starting `w` from the
/// previous stage. `p0` supplies `h`, `A`, `g` and the solve policy; its own
/// `nu` is ignored.
pub fn continuation(p0: &RelaxedProblem, sched: &ContinuationSchedule, w0: &Vector) -> Result<ContinuationResult, Error> {
    sched.validate()?;
    check_dim("w0", p0.rows(), w0.len())?;
    let mut w = w0.clone();
    let mut x = Vector::zeros(p0.cols());
    let mut stages = Vec::new();
    for nu in sched.stages() {
        let p = p0.with_nu(nu)?;
        let r = rs_pgd(&p, &w, &sched.stage_opts)?;
        log::debug!("continuation stage nu={nu}: {} iterations, gap {}", r.summary.iterations, r.summary.final_gap);
        w = r.w;
        x = r.x;
        stages.push(Stage { nu, trace: r.trace, summary: r.summary });
    }
    Ok(ContinuationResult { w, x, stages })
}
