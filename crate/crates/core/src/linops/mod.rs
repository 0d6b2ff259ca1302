//! Linear operators and the regularized least-squares engines behind the
//! partial minimization `x_nu(w) = argmin_x g(x) + 1/(2 nu) ||A x - w||^2`.

mod hadamard;
mod lsq;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub use hadamard::{fast_hadamard, fast_hadamard_in_place};
pub use lsq::{projection_residual, solve_partial, LsMethod, LsSolvePolicy, PartialSolver, QuadraticRegularizer};

use crate::{Matrix, Vector};

#[derive(Debug, thiserror::Error)]
pub enum LinopError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("solve policy {policy} is not valid for a {kind} operator")]
    PolicyMismatch { policy: &'static str, kind: &'static str },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("least-squares solve produced a non-finite value")]
    NonFinite,
}

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<(), LinopError> {
    if expected != found {
        return Err(LinopError::DimensionMismatch { what, expected, found });
    }
    Ok(())
}

/// Structure of a [`LinearOperator`].
#[derive(Debug, Clone)]
pub enum OperatorKind {
    /// Explicit matrix.
    Dense(Matrix),
    /// `[H S_1; ...; H S_k]` with `H` the normalized Walsh-Hadamard matrix
    /// and `S_j` diagonal sign matrices.
    HadamardStack { n: usize, signs: Vec<Vec<f64>> },
    /// Vertical stack of operators sharing a column count.
    Stack(Vec<LinearOperator>),
    /// `x_i - x_j` for every pair `i < j` of `points` vectors of length `dim`,
    /// pairs in lexicographic order, points stored row-major.
    PairwiseDifference { points: usize, dim: usize },
    Identity(usize),
}

/// Immutable linear map `R^cols -> R^rows`.
///
/// Clones share the fast-transform counter.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    rows: usize,
    cols: usize,
    kind: OperatorKind,
    transforms: Arc<AtomicU64>,
}

impl LinearOperator {
    fn from_kind(rows: usize, cols: usize, kind: OperatorKind) -> Self {
        LinearOperator { rows, cols, kind, transforms: Arc::new(AtomicU64::new(0)) }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_kind(n, n, OperatorKind::Identity(n))
    }

    pub fn dense(matrix: Matrix) -> Self {
        Self::from_kind(matrix.nrows(), matrix.ncols(), OperatorKind::Dense(matrix))
    }

    /// Builds the sign-diagonal Hadamard stack; every sign must be `+1` or `-1`.
    pub fn hadamard_stack(n: usize, signs: Vec<Vec<f64>>) -> Result<Self, LinopError> {
        if n == 0 || !n.is_power_of_two() {
            return Err(LinopError::NotPowerOfTwo(n));
        }
        if signs.is_empty() {
            return Err(LinopError::InvalidOperator("hadamard stack needs at least one block".into()));
        }
        for s in &signs {
            check_len("sign diagonal", n, s.len())?;
            if s.iter().any(|&v| v != 1.0 && v != -1.0) {
                return Err(LinopError::InvalidOperator("sign diagonal entries must be +1 or -1".into()));
            }
        }
        let k = signs.len();
        Ok(Self::from_kind(k * n, n, OperatorKind::HadamardStack { n, signs }))
    }

    pub fn stack(blocks: Vec<LinearOperator>) -> Result<Self, LinopError> {
        let first = blocks
            .first()
            .ok_or_else(|| LinopError::InvalidOperator("empty stack".into()))?;
        let cols = first.cols;
        for b in &blocks {
            check_len("stacked block columns", cols, b.cols)?;
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        Ok(Self::from_kind(rows, cols, OperatorKind::Stack(blocks)))
    }

    pub fn pairwise_difference(points: usize, dim: usize) -> Result<Self, LinopError> {
        if points < 2 || dim == 0 {
            return Err(LinopError::InvalidOperator("pairwise difference needs >= 2 points and dim >= 1".into()));
        }
        let pairs = points * (points - 1) / 2;
        Ok(Self::from_kind(pairs * dim, points * dim, OperatorKind::PairwiseDifference { points, dim }))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            OperatorKind::Dense(_) => "dense",
            OperatorKind::HadamardStack { .. } => "hadamard-stack",
            OperatorKind::Stack(_) => "stack",
            OperatorKind::PairwiseDifference { .. } => "pairwise-difference",
            OperatorKind::Identity(_) => "identity",
        }
    }

    /// Number of fast Walsh-Hadamard transforms performed so far (including
    /// nested blocks and clones sharing this operator's counter).
    pub fn transform_count(&self) -> u64 {
        let own = self.transforms.load(Ordering::Relaxed);
        match &self.kind {
            OperatorKind::Stack(blocks) => own + blocks.iter().map(|b| b.transform_count()).sum::<u64>(),
            _ => own,
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector, LinopError> {
        check_len("apply input", self.cols, x.len())?;
        Ok(self.apply_unchecked(x))
    }

    pub fn adjoint(&self, y: &Vector) -> Result<Vector, LinopError> {
        check_len("adjoint input", self.rows, y.len())?;
        Ok(self.adjoint_unchecked(y))
    }

    pub(crate) fn apply_unchecked(&self, x: &Vector) -> Vector {
        match &self.kind {
            OperatorKind::Identity(_) => x.clone(),
            OperatorKind::Dense(a) => a * x,
            OperatorKind::HadamardStack { n, signs } => {
                let mut out = Vector::zeros(self.rows);
                for (j, s) in signs.iter().enumerate() {
                    let block = &mut out.as_mut_slice()[j * n..(j + 1) * n];
                    for ((o, &xi), &si) in block.iter_mut().zip(x.iter()).zip(s.iter()) {
                        *o = si * xi;
                    }
                    hadamard::fwht_normalized(block);
                }
                self.transforms.fetch_add(signs.len() as u64, Ordering::Relaxed);
                out
            }
            OperatorKind::Stack(blocks) => {
                let mut out = Vector::zeros(self.rows);
                let mut offset = 0;
                for b in blocks {
                    let part = b.apply_unchecked(x);
                    out.rows_mut(offset, b.rows).copy_from(&part);
                    offset += b.rows;
                }
                out
            }
            OperatorKind::PairwiseDifference { points, dim } => {
                let (p, d) = (*points, *dim);
                let mut out = Vector::zeros(self.rows);
                let mut row = 0;
                for i in 0..p {
                    for j in (i + 1)..p {
                        for a in 0..d {
                            out[row + a] = x[i * d + a] - x[j * d + a];
                        }
                        row += d;
                    }
                }
                out
            }
        }
    }

    pub(crate) fn adjoint_unchecked(&self, y: &Vector) -> Vector {
        match &self.kind {
            OperatorKind::Identity(_) => y.clone(),
            OperatorKind::Dense(a) => a.tr_mul(y),
            OperatorKind::HadamardStack { n, signs } => {
                let mut out = Vector::zeros(*n);
                let mut buf = vec![0.0; *n];
                for (j, s) in signs.iter().enumerate() {
                    buf.copy_from_slice(&y.as_slice()[j * n..(j + 1) * n]);
                    hadamard::fwht_normalized(&mut buf);
                    for ((o, &b), &si) in out.iter_mut().zip(buf.iter()).zip(s.iter()) {
                        *o += si * b;
                    }
                }
                self.transforms.fetch_add(signs.len() as u64, Ordering::Relaxed);
                out
            }
            OperatorKind::Stack(blocks) => {
                let mut out = Vector::zeros(self.cols);
                let mut offset = 0;
                for b in blocks {
                    let part = y.rows(offset, b.rows).clone_owned();
                    out += b.adjoint_unchecked(&part);
                    offset += b.rows;
                }
                out
            }
            OperatorKind::PairwiseDifference { points, dim } => {
                let (p, d) = (*points, *dim);
                let mut out = Vector::zeros(self.cols);
                let mut row = 0;
                for i in 0..p {
                    for j in (i + 1)..p {
                        for a in 0..d {
                            out[i * d + a] += y[row + a];
                            out[j * d + a] -= y[row + a];
                        }
                        row += d;
                    }
                }
                out
            }
        }
    }

    /// `A^T A` as an explicit matrix.
    pub fn gram(&self) -> Matrix {
        match &self.kind {
            OperatorKind::Identity(n) => Matrix::identity(*n, *n),
            OperatorKind::Dense(a) => a.tr_mul(a),
            OperatorKind::HadamardStack { n, signs } => Matrix::identity(*n, *n) * signs.len() as f64,
            OperatorKind::Stack(blocks) => {
                let mut g = Matrix::zeros(self.cols, self.cols);
                for b in blocks {
                    g += b.gram();
                }
                g
            }
            OperatorKind::PairwiseDifference { points, dim } => {
                let (p, d) = (*points, *dim);
                Matrix::from_fn(p * d, p * d, |r, c| {
                    let (i, a) = (r / d, r % d);
                    let (j, b) = (c / d, c % d);
                    if a != b {
                        0.0
                    } else if i == j {
                        (p - 1) as f64
                    } else {
                        -1.0
                    }
                })
            }
        }
    }

    /// Diagonal of `A^T A`.
    pub fn column_norms_sq(&self) -> Vector {
        match &self.kind {
            OperatorKind::Identity(n) => Vector::from_element(*n, 1.0),
            OperatorKind::Dense(a) => Vector::from_iterator(a.ncols(), a.column_iter().map(|c| c.norm_squared())),
            OperatorKind::HadamardStack { n, signs } => Vector::from_element(*n, signs.len() as f64),
            OperatorKind::Stack(blocks) => {
                let mut d = Vector::zeros(self.cols);
                for b in blocks {
                    d += b.column_norms_sq();
                }
                d
            }
            OperatorKind::PairwiseDifference { points, .. } => Vector::from_element(self.cols, (*points - 1) as f64),
        }
    }

    /// Explicit matrix of the operator.
    pub fn to_dense(&self) -> Matrix {
        if let OperatorKind::Dense(a) = &self.kind {
            return a.clone();
        }
        let mut m = Matrix::zeros(self.rows, self.cols);
        let mut e = Vector::zeros(self.cols);
        for j in 0..self.cols {
            e[j] = 1.0;
            m.set_column(j, &self.apply_unchecked(&e));
            e[j] = 0.0;
        }
        m
    }
}
