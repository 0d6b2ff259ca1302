//! The relaxed problem `p_nu(w) = h(w) + g_nu(w)` and its per-iteration trace.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{check_dim, Error};
use crate::linops::{LinearOperator, LsSolvePolicy, PartialSolver, QuadraticRegularizer};
use crate::prox::SeparableNonsmooth;
use crate::Vector;

/// `(h, A, g, nu)` together with a prepared partial-minimization engine.
#[derive(Debug, Clone)]
pub struct RelaxedProblem {
    h: Arc<SeparableNonsmooth>,
    op: Arc<LinearOperator>,
    g: QuadraticRegularizer,
    policy: LsSolvePolicy,
    solver: PartialSolver,
}

impl RelaxedProblem {
    pub fn new(
        h: SeparableNonsmooth,
        op: LinearOperator,
        g: QuadraticRegularizer,
        nu: f64,
        policy: LsSolvePolicy,
    ) -> Result<Self, Error> {
        Self::from_shared(Arc::new(h), Arc::new(op), g, nu, policy)
    }

    pub fn from_shared(
        h: Arc<SeparableNonsmooth>,
        op: Arc<LinearOperator>,
        g: QuadraticRegularizer,
        nu: f64,
        policy: LsSolvePolicy,
    ) -> Result<Self, Error> {
        check_dim("nonsmooth plan vs operator rows", op.rows(), h.len())?;
        let solver = PartialSolver::new(op.clone(), &g, nu, policy)?;
        Ok(RelaxedProblem { h, op, g, policy, solver })
    }

    /// Same problem at a new `nu`; any factorization is rebuilt.
    pub fn with_nu(&self, nu: f64) -> Result<Self, Error> {
        Self::from_shared(self.h.clone(), self.op.clone(), self.g.clone(), nu, self.policy)
    }

    pub fn h(&self) -> &SeparableNonsmooth {
        &self.h
    }

    pub fn op(&self) -> &LinearOperator {
        &self.op
    }

    pub fn g(&self) -> &QuadraticRegularizer {
        &self.g
    }

    pub fn nu(&self) -> f64 {
        self.solver.nu()
    }

    pub fn policy(&self) -> LsSolvePolicy {
        self.policy
    }

    pub fn rows(&self) -> usize {
        self.op.rows()
    }

    pub fn cols(&self) -> usize {
        self.op.cols()
    }

    /// `x_nu(w)` and the inner iteration count.
    pub fn partial_minimize_counted(&self, w: &Vector) -> Result<(Vector, usize), Error> {
        Ok(self.solver.solve(w)?)
    }

    pub fn partial_minimize(&self, w: &Vector) -> Result<Vector, Error> {
        Ok(self.solver.solve(w)?.0)
    }

    /// `(w - A x) / nu` for `x = x_nu(w)`.
    pub fn grad_g_nu(&self, w: &Vector, x: &Vector) -> Result<Vector, Error> {
        check_dim("w", self.rows(), w.len())?;
        let ax = self.op.apply(x)?;
        Ok((w - ax) / self.nu())
    }

    /// Smooth part `g(x) + 1/(2 nu) ||Ax - w||^2`; equals `g_nu(w)` at `x = x_nu(w)`.
    pub fn coupling_value(&self, w: &Vector, x: &Vector) -> Result<f64, Error> {
        check_dim("w", self.rows(), w.len())?;
        let r = self.op.apply(x)? - w;
        Ok(self.g.value(x) + r.norm_squared() / (2.0 * self.nu()))
    }

    /// `f_nu(x, w) = h(w) + 1/(2 nu) ||Ax - w||^2 + g(x)`.
    pub fn objective(&self, w: &Vector, x: &Vector) -> Result<f64, Error> {
        Ok(self.h.value(w) + self.coupling_value(w, x)?)
    }

    pub fn g_nu(&self, w: &Vector) -> Result<f64, Error> {
        let x = self.partial_minimize(w)?;
        self.coupling_value(w, &x)
    }

    /// `p_nu(w)`.
    pub fn reduced_objective(&self, w: &Vector) -> Result<f64, Error> {
        Ok(self.h.value(w) + self.g_nu(w)?)
    }

    /// `||A (x_prev - x_cur) / nu||^2`, the measured stationarity bound.
    pub fn optimality_witness(&self, x_prev: &Vector, x_cur: &Vector) -> Result<f64, Error> {
        let d = self.op.apply(&(x_prev - x_cur))?;
        Ok(d.norm_squared() / (self.nu() * self.nu()))
    }

    /// `||Ax - w||`.
    pub fn coupling_gap(&self, w: &Vector, x: &Vector) -> Result<f64, Error> {
        check_dim("w", self.rows(), w.len())?;
        Ok((self.op.apply(x)? - w).norm())
    }

    /// Original objective `h(Ax) + g(x)`.
    pub fn original_objective(&self, x: &Vector) -> Result<f64, Error> {
        let ax = self.op.apply(x)?;
        Ok(self.h.value(&ax) + self.g.value(x))
    }
}

/// One row of a [`SolverTrace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub objective: f64,
    /// NaN on the initial row.
    pub optimality: f64,
    pub gap: f64,
    pub inner_iters: usize,
    pub ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverTrace {
    pub nu: f64,
    pub rows: Vec<TraceRow>,
}

pub const TRACE_HEADER: &str = "iter,objective,optimality,gap,inner_iters,ms";

impl SolverTrace {
    pub fn new(nu: f64) -> Self {
        SolverTrace { nu, rows: Vec::new() }
    }

    pub fn push(&mut self, row: TraceRow) {
        debug_assert!(self.rows.last().is_none_or(|r| r.iter < row.iter));
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.objective).collect()
    }

    pub fn witnesses(&self) -> Vec<f64> {
        self.rows.iter().skip(1).map(|r| r.optimality).collect()
    }

    /// CSV with [`TRACE_HEADER`]; floats use the shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(TRACE_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(s, "{},{:?},{:?},{:?},{},{:?}", r.iter, r.objective, r.optimality, r.gap, r.inner_iters, r.ms);
        }
        s
    }
}
