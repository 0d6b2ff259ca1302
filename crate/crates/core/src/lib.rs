//! Relax-and-split solvers for composite problems of the form
//!
//! ```text
//! min_x  h(A x) + g(x)
//! ```
//!
//! where `h` is separable, nonsmooth and possibly nonconvex, `A` is linear and
//! `g` is a convex quadratic. The map `A x` is decoupled through an auxiliary
//! variable `w`:
//!
//! ```text
//! f_nu(x, w) = h(w) + 1/(2 nu) ||A x - w||^2 + g(x)
//! p_nu(w)    = h(w) + g_nu(w),   g_nu(w) = min_x g(x) + 1/(2 nu) ||A x - w||^2
//! ```
//!
//! `g_nu` is convex with a `1/nu`-Lipschitz gradient, so proximal gradient
//! methods on `p_nu` need only a regularized least-squares solve and a
//! separable proximal step per iteration.
//!
//! Module map:
//! - [`linops`]: operators, fast Walsh-Hadamard transform, partial minimization engines.
//! - [`prox`]: scalar and block proximal kernels and the capped-simplex projection.
//! - [`relax`]: the relaxed problem, its objective, gradient and optimality measures.
//! - [`solvers`]: proximal gradient, FISTA, trimmed block-coordinate descent, ADMM, continuation.
//! - [`oracles`]: brute-force references for testing; never called by the solvers.
//! - [`io`]: MatrixMarket, sign-stack, PGM and trace CSV formats.

pub mod error;
pub mod io;
pub mod linops;
pub mod oracles;
pub mod prox;
pub mod relax;
pub mod solvers;

pub use linops::{LinearOperator, LsMethod, LsSolvePolicy, OperatorKind, PartialSolver, QuadraticRegularizer};
pub use prox::{BlockProxKind, ScalarProxKind, SeparableNonsmooth, Term};
pub use relax::{RelaxedProblem, SolverTrace, TraceRow};
pub use error::Error;
pub use solvers::{RunSummary, SolveOptions};

/// Dense column vector used throughout.
pub type Vector = nalgebra::DVector<f64>;
/// Dense column-major matrix.
pub type Matrix = nalgebra::DMatrix<f64>;
