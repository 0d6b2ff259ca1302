//! Outer loops on the relaxed problem.

mod admm;
mod continuation;
mod fista;
mod pgd;
mod trs;

pub use admm::{admm, AdmmOptions, AdmmResult};
pub use continuation::{continuation, ContinuationResult, ContinuationSchedule, Stage};
pub use fista::rs_fista;
pub use pgd::rs_pgd;
pub use trs::{trs_bcd, TrimmedProblem, TrsResult};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::relax::{SolverTrace, TraceRow};
use crate::Vector;

/// Stopping and recording controls shared by every outer loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Stop once the per-iteration witness is at most this.
    pub tol_optimality: f64,
    /// Stop after three consecutive objective changes at most this.
    pub tol_objective_delta: f64,
    pub record_trace: bool,
    /// Fill the `ms` column and `wall_ms`; off keeps output reproducible.
    pub record_timing: bool,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iter: 1000,
            tol_optimality: 1e-12,
            tol_objective_delta: 0.0,
            record_trace: true,
            record_timing: false,
            seed: 0,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<(), Error> {
        if self.max_iter == 0 {
            return Err(Error::BadParameter("max_iter must be at least 1".into()));
        }
        if !(self.tol_optimality >= 0.0 && self.tol_objective_delta >= 0.0) {
            return Err(Error::BadParameter("tolerances must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol_optimality = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Optimality,
    ObjectiveStall,
    MaxIter,
}

/// Per-run record written next to the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub iterations: usize,
    pub final_objective: f64,
    pub final_gap: f64,
    pub converged: bool,
    pub wall_ms: f64,
}

impl RunSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summary serializes")
    }
}

/// Result of [`rs_pgd`] and [`rs_fista`].
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub w: Vector,
    pub x: Vector,
    pub trace: SolverTrace,
    pub summary: RunSummary,
    pub stop: StopReason,
}

/// Tracks the stopping rule, the trace and the clock.
pub(crate) struct Recorder {
    opts: SolveOptions,
    start: Instant,
    stall: usize,
    witness_stop: bool,
    last_objective: f64,
    pub(crate) trace: SolverTrace,
    last_row: Option<TraceRow>,
}

impl Recorder {
    pub(crate) fn new(opts: &SolveOptions, nu: f64) -> Result<Self, Error> {
        opts.validate()?;
        Ok(Recorder {
            opts: *opts,
            start: Instant::now(),
            stall: 0,
            witness_stop: true,
            last_objective: f64::NAN,
            trace: SolverTrace::new(nu),
            last_row: None,
        })
    }

    pub(crate) fn without_witness_stop(mut self) -> Self {
        self.witness_stop = false;
        self
    }

    fn ms(&self) -> f64 {
        if self.opts.record_timing {
            self.start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        }
    }

    /// Records a row; returns the stop reason once one applies.
    pub(crate) fn record(
        &mut self,
        iter: usize,
        objective: f64,
        optimality: f64,
        gap: f64,
        inner_iters: usize,
    ) -> Option<StopReason> {
        let row = TraceRow { iter, objective, optimality, gap, inner_iters, ms: self.ms() };
        if self.opts.record_trace {
            self.trace.push(row);
        }
        self.last_row = Some(row);
        if iter == 0 {
            self.last_objective = objective;
            return None;
        }
        let delta = (objective - self.last_objective).abs();
        self.last_objective = objective;
        if delta <= self.opts.tol_objective_delta {
            self.stall += 1;
        } else {
            self.stall = 0;
        }
        if self.witness_stop && optimality <= self.opts.tol_optimality {
            Some(StopReason::Optimality)
        } else if self.stall >= 3 {
            Some(StopReason::ObjectiveStall)
        } else if iter >= self.opts.max_iter {
            Some(StopReason::MaxIter)
        } else {
            None
        }
    }

    pub(crate) fn finish(self, stop: StopReason) -> (SolverTrace, RunSummary) {
        let row = self.last_row.expect("at least the initial row is recorded");
        let summary = RunSummary {
            iterations: row.iter,
            final_objective: row.objective,
            final_gap: row.gap,
            converged: stop != StopReason::MaxIter,
            wall_ms: self.ms(),
        };
        (self.trace, summary)
    }
}
