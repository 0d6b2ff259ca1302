//! Exact robust PCA `min_{L,R} ||D - LR||_1` through the relaxation
//! `||D - W||_1 + 1/(2 nu) ||W - LR||_F^2`, alternating an elementwise prox
//! in `W` with a rank-`k` truncated SVD in `(L, R)`.

use rand::Rng;
use rand_distr::StandardNormal;
use rsplit::prox::prox_abs_deviation;
use rsplit::{Matrix, Vector};

use crate::{seeded, AppError, Result};

pub const SVD_MAX_SWEEPS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vector,
    pub v: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        &self.u * Matrix::from_diagonal(&self.sigma) * self.v.transpose()
    }
}

/// Leading `k` singular triplets by one-sided (Hestenes) Jacobi on the
/// thinner orientation of `m`. Columns of `u` and `v` are orthonormal even
/// when `m` has rank below `k`.
pub fn truncated_svd(m: &Matrix, k: usize, tol: f64) -> Result<Svd> {
    let (rows, cols) = m.shape();
    if k == 0 || k > rows.min(cols) {
        return Err(AppError::Invalid(format!("rank {k} outside 1..={}", rows.min(cols))));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(AppError::Invalid("matrix has non-finite entries".into()));
    }
    let transposed = cols > rows;
    let mut g = if transposed { m.transpose() } else { m.clone() };
    let n = g.ncols();
    let mut v = Matrix::identity(n, n);
    let tol = tol.max(f64::EPSILON * g.nrows() as f64);
    // columns at rounding level of ||m||_F carry no rank; rotating them
    // against each other never settles
    let negligible = (n as f64 * f64::EPSILON).powi(2) * g.norm_squared();
    let mut converged = false;
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = g.column(i).norm_squared();
                let beta = g.column(j).norm_squared();
                let gamma = g.column(i).dot(&g.column(j));
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() || alpha.min(beta) <= negligible {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut g, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(AppError::NoConvergence { what: "Jacobi SVD", iters: SVD_MAX_SWEEPS });
    }
    let norms: Vec<f64> = (0..n).map(|i| g.column(i).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    let order = &order[..k];
    let sigma = Vector::from_iterator(k, order.iter().map(|&i| norms[i]));
    let floor = sigma[0] * f64::EPSILON * (rows.max(cols) as f64);
    let mut left = Matrix::zeros(g.nrows(), k);
    let mut right = Matrix::zeros(n, k);
    for (c, &i) in order.iter().enumerate() {
        right.set_column(c, &v.column(i));
        if norms[i] > floor {
            left.set_column(c, &(g.column(i) / norms[i]));
        }
    }
    let sigma = sigma.map(|s| if s > floor { s } else { 0.0 });
    complete_orthonormal(&mut left, &sigma);
    Ok(if transposed { Svd { u: right, sigma, v: left } } else { Svd { u: left, sigma, v: right } })
}

fn rotate(m: &mut Matrix, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let (a, b) = (m[(r, i)], m[(r, j)]);
        m[(r, i)] = c * a - s * b;
        m[(r, j)] = s * a + c * b;
    }
}

/// Fills the columns with zero singular value by Gram-Schmidt on the
/// coordinate axes.
fn complete_orthonormal(q: &mut Matrix, sigma: &Vector) {
    let rows = q.nrows();
    let mut axis = 0;
    for c in 0..q.ncols() {
        if sigma[c] > 0.0 {
            continue;
        }
        while axis < rows {
            let mut e = Vector::zeros(rows);
            e[axis] = 1.0;
            axis += 1;
            for _ in 0..2 {
                for o in 0..q.ncols() {
                    if o != c {
                        let p = q.column(o).dot(&e);
                        e -= q.column(o) * p;
                    }
                }
            }
            let ne = e.norm();
            if ne > 1e-8 {
                q.set_column(c, &(e / ne));
                break;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RpcaInstance {
    pub d: Matrix,
    pub rank: usize,
    pub nu: f64,
}

impl RpcaInstance {
    pub fn new(d: Matrix, rank: usize, nu: f64) -> Result<Self> {
        if rank == 0 || rank > d.nrows().min(d.ncols()) {
            return Err(AppError::Invalid(format!("rank {rank} outside 1..={}", d.nrows().min(d.ncols()))));
        }
        if !(nu.is_finite() && nu > 0.0) {
            return Err(AppError::Invalid(format!("nu {nu}")));
        }
        Ok(Self { d, rank, nu })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RpcaStart {
    /// `(L, R)` from the rank-`k` SVD of `D`.
    #[default]
    Svd,
    /// `L R = 0`, so the first `W` step clips `D` at `+-nu`.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpcaOptions {
    pub start: RpcaStart,
    pub max_sweeps: usize,
    /// Stop once `||LR - (LR)_prev||_F <= tol ||LR||_F`.
    pub tol: f64,
    /// `nu` is multiplied by this after every sweep; `1` keeps it fixed.
    pub nu_factor: f64,
    pub nu_min: f64,
    pub svd_tol: f64,
}

impl Default for RpcaOptions {
    fn default() -> Self {
        Self { start: RpcaStart::Svd, max_sweeps: 25, tol: 1e-10, nu_factor: 1.0, nu_min: 0.0, svd_tol: 1e-15 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub sweep: usize,
    pub nu: f64,
    /// Relaxed objective before the sweep, at this sweep's `nu`.
    pub start_objective: f64,
    pub objective: f64,
    /// `||D - LR||_1`
    pub l1_fit: f64,
    pub change: f64,
}

pub const SWEEP_HEADER: &str = "sweep,nu,start_objective,objective,l1_fit,change";

#[derive(Debug, Clone)]
pub struct RpcaResult {
    pub l: Matrix,
    pub r: Matrix,
    pub w: Matrix,
    pub sweeps: Vec<SweepRow>,
    pub converged: bool,
}

impl RpcaResult {
    pub fn background(&self) -> Matrix {
        &self.l * &self.r
    }

    pub fn foreground(&self) -> Matrix {
        &self.w - self.background()
    }

    pub fn sweeps_csv(&self) -> String {
        let mut s = String::from(SWEEP_HEADER);
        s.push('\n');
        for r in &self.sweeps {
            s.push_str(&format!("{},{:?},{:?},{:?},{:?},{:?}\n", r.sweep, r.nu, r.start_objective, r.objective, r.l1_fit, r.change));
        }
        s
    }
}

pub fn rpca_objective(d: &Matrix, w: &Matrix, lr: &Matrix, nu: f64) -> f64 {
    (d - w).abs().sum() + (w - lr).norm_squared() / (2.0 * nu)
}

fn factor(svd: &Svd) -> (Matrix, Matrix) {
    let root = svd.sigma.map(f64::sqrt);
    let l = &svd.u * Matrix::from_diagonal(&root);
    let r = Matrix::from_diagonal(&root) * svd.v.transpose();
    (l, r)
}

/// Starts from `W = D` and `(L, R)` chosen by `opts.start`. Row 0 of the
/// sweep log describes that start.
pub fn rpca_solve(inst: &RpcaInstance, opts: &RpcaOptions) -> Result<RpcaResult> {
    if opts.max_sweeps == 0 || !(opts.nu_factor > 0.0 && opts.nu_factor <= 1.0) || !(opts.nu_min >= 0.0) {
        return Err(AppError::Invalid("bad RPCA options".into()));
    }
    let d = &inst.d;
    let (mut l, mut r) = match opts.start {
        RpcaStart::Svd => factor(&truncated_svd(d, inst.rank, opts.svd_tol)?),
        RpcaStart::Zero => (Matrix::zeros(d.nrows(), inst.rank), Matrix::zeros(inst.rank, d.ncols())),
    };
    let mut lr = &l * &r;
    let mut w = d.clone();
    let mut nu = inst.nu;
    let mut sweeps = vec![SweepRow {
        sweep: 0,
        nu,
        start_objective: f64::NAN,
        objective: rpca_objective(d, &w, &lr, nu),
        l1_fit: (d - &lr).abs().sum(),
        change: f64::NAN,
    }];
    let mut converged = false;
    for s in 1..=opts.max_sweeps {
        if s > 1 {
            nu = (nu * opts.nu_factor).max(opts.nu_min).max(f64::MIN_POSITIVE);
        }
        let start_objective = rpca_objective(d, &w, &lr, nu);
        w = lr.zip_map(d, |z, b| prox_abs_deviation(z, nu, b));
        let svd = truncated_svd(&w, inst.rank, opts.svd_tol).map_err(|e| match e {
            AppError::NoConvergence { what, .. } => AppError::NoConvergence { what, iters: s },
            other => other,
        })?;
        (l, r) = factor(&svd);
        let next = &l * &r;
        let change = (&next - &lr).norm() / next.norm().max(f64::MIN_POSITIVE);
        lr = next;
        sweeps.push(SweepRow {
            sweep: s,
            nu,
            start_objective,
            objective: rpca_objective(d, &w, &lr, nu),
            l1_fit: (d - &lr).abs().sum(),
            change,
        });
        if change <= opts.tol {
            converged = true;
            break;
        }
    }
    Ok(RpcaResult { l, r, w, sweeps, converged })
}

/// `1.4826 median |D - median(D)|`, a robust entry scale for picking `nu`.
pub fn robust_scale(d: &Matrix) -> f64 {
    let med = median(d.iter().copied().collect());
    1.4826 * median(d.iter().map(|v| (v - med).abs()).collect())
}

fn median(mut a: Vec<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.sort_by(f64::total_cmp);
    let mid = a.len() / 2;
    if a.len() % 2 == 1 {
        a[mid]
    } else {
        0.5 * (a[mid - 1] + a[mid])
    }
}

/// `|W - LR| > level`; the default level is three times the median absolute
/// foreground entry.
pub fn foreground_mask(foreground: &Matrix, level: Option<f64>) -> Matrix {
    let level = level.unwrap_or_else(|| 3.0 * median(foreground.iter().map(|v| v.abs()).collect()));
    foreground.map(|v| f64::from(u8::from(v.abs() > level)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedRpca {
    pub d: Matrix,
    pub low_rank: Matrix,
    /// `(row, col)` of every spike.
    pub spikes: Vec<(usize, usize)>,
}

/// `D = L0 R0 + S` with Gaussian factors and `floor(fraction m n)` spikes
/// of `+-magnitude` at seeded-random positions.
pub fn planted_rpca(m: usize, n: usize, rank: usize, fraction: f64, magnitude: f64, seed: u64) -> Result<PlantedRpca> {
    if rank == 0 || rank > m.min(n) || !(0.0..=1.0).contains(&fraction) {
        return Err(AppError::Invalid("bad planted RPCA parameters".into()));
    }
    let mut rng = seeded(seed);
    let l0 = Matrix::from_fn(m, rank, |_, _| rng.sample(StandardNormal));
    let r0 = Matrix::from_fn(rank, n, |_, _| rng.sample(StandardNormal));
    let low_rank = l0 * r0;
    let total = m * n;
    let count = (fraction * total as f64).floor() as usize;
    let mut idx: Vec<usize> = (0..total).collect();
    for i in 0..count {
        let j = rng.random_range(i..total);
        idx.swap(i, j);
    }
    let mut chosen = idx[..count].to_vec();
    chosen.sort_unstable();
    let mut d = low_rank.clone();
    let spikes: Vec<(usize, usize)> = chosen.iter().map(|&t| (t / n, t % n)).collect();
    for &(i, j) in &spikes {
        d[(i, j)] += if rng.random::<bool>() { magnitude } else { -magnitude };
    }
    Ok(PlantedRpca { d, low_rank, spikes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthonormal_cols(q: &Matrix) -> f64 {
        (q.transpose() * q - Matrix::identity(q.ncols(), q.ncols())).amax()
    }

    #[test]
    fn diagonal_matrix() {
        let m = Matrix::from_diagonal(&Vector::from_vec(vec![3.0, 2.0, 1.0]));
        let s = truncated_svd(&m, 2, 1e-15).unwrap();
        assert_eq!(s.sigma, Vector::from_vec(vec![3.0, 2.0]));
        assert_eq!(s.u.column(0).abs(), Vector::from_vec(vec![1.0, 0.0, 0.0]));
        assert_eq!(s.v.column(1).abs(), Vector::from_vec(vec![0.0, 1.0, 0.0]));
    }

    #[test]
    fn full_rank_reconstructs_both_orientations() {
        let mut r = seeded(3);
        for (rows, cols) in [(7, 4), (4, 7), (5, 5)] {
            let m = Matrix::from_fn(rows, cols, |_, _| r.sample(StandardNormal));
            let s = truncated_svd(&m, rows.min(cols), 1e-15).unwrap();
            assert!((s.reconstruct() - &m).amax() < 1e-8);
            assert!(orthonormal_cols(&s.u) < 1e-8 && orthonormal_cols(&s.v) < 1e-8);
        }
    }

    #[test]
    fn rank_deficient_input_still_orthonormal() {
        let m = Matrix::from_fn(6, 5, |i, j| (i + 1) as f64 * (j as f64 - 2.0));
        let s = truncated_svd(&m, 4, 1e-15).unwrap();
        assert!(orthonormal_cols(&s.u) < 1e-8 && orthonormal_cols(&s.v) < 1e-8);
        assert!(s.sigma[1] == 0.0 && s.sigma[3] == 0.0);
        assert!(truncated_svd(&Matrix::zeros(3, 3), 2, 1e-15).is_ok());
        assert!(truncated_svd(&m, 6, 1e-15).is_err());
    }

    #[test]
    fn already_low_rank_is_fixed_after_one_sweep() {
        let p = planted_rpca(8, 10, 2, 0.0, 0.0, 1).unwrap();
        let inst = RpcaInstance::new(p.d.clone(), 2, 1.0).unwrap();
        let res = rpca_solve(&inst, &RpcaOptions { max_sweeps: 1, ..Default::default() }).unwrap();
        assert!((res.background() - &p.d).amax() < 1e-10);
        assert!((&res.w - &p.d).amax() < 1e-10);
        assert!(res.sweeps[1].objective < 1e-18);
    }

    #[test]
    fn mask_default_level() {
        let f = Matrix::from_row_slice(1, 5, &[0.0, 0.1, 0.1, 0.2, 5.0]);
        assert_eq!(foreground_mask(&f, None), Matrix::from_row_slice(1, 5, &[0.0, 0.0, 0.0, 0.0, 1.0]));
        assert_eq!(foreground_mask(&f, Some(0.15)).sum(), 2.0);
    }
}
