//! Independent references used by tests and acceptance runs. Nothing here is
//! called by the solvers.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use crate::relax::SolverTrace;
use crate::{Matrix, Vector};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("dimension {0} exceeds the enumeration cap of 12")]
    DimensionCap(usize),
    #[error("no feasible point for budget {0}")]
    Infeasible(f64),
    #[error("iteration cap {0} reached")]
    IterationCap(usize),
    #[error("singular system")]
    Singular,
    #[error("dimension mismatch")]
    Dimension,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Oracle-vs-artifact comparison against a stated tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub oracle: f64,
    pub artifact: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Index of the first failing step, for sequence audits.
    pub first_violation: Option<usize>,
}

impl OracleReport {
    pub fn compare(quantity: &str, oracle: f64, artifact: f64, tolerance: f64) -> Self {
        let abs_gap = (artifact - oracle).abs();
        OracleReport {
            quantity: quantity.to_string(),
            oracle,
            artifact,
            abs_gap,
            rel_gap: abs_gap / oracle.abs().max(f64::MIN_POSITIVE),
            tolerance,
            pass: abs_gap <= tolerance,
            first_violation: None,
        }
    }

    pub const CSV_HEADER: &'static str = "quantity,oracle,artifact,abs_gap,rel_gap,tolerance,pass,first_violation";

    pub fn csv_row(&self) -> String {
        let fv = self.first_violation.map_or(String::new(), |i| i.to_string());
        format!(
            "{},{:?},{:?},{:?},{:?},{:?},{},{}",
            self.quantity, self.oracle, self.artifact, self.abs_gap, self.rel_gap, self.tolerance, self.pass, fv
        )
    }
}

/// Appends reports to a CSV audit log, writing the header for a new file.
pub fn append_audit_csv(path: &Path, reports: &[OracleReport]) -> Result<(), OracleError> {
    let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "{}", OracleReport::CSV_HEADER)?;
    }
    for r in reports {
        writeln!(f, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Central differences `(f(w + s e_i) - f(w - s e_i)) / (2 s)`.
pub fn finite_difference_grad(f: impl Fn(&Vector) -> f64, w: &Vector, step: f64) -> Vector {
    let mut g = Vector::zeros(w.len());
    let mut probe = w.clone();
    for i in 0..w.len() {
        probe[i] = w[i] + step;
        let fp = f(&probe);
        probe[i] = w[i] - step;
        let fm = f(&probe);
        probe[i] = w[i];
        g[i] = (fp - fm) / (2.0 * step);
    }
    g
}

/// Directional central difference of `f` at `w` along `d`.
pub fn finite_difference_directional(f: impl Fn(&Vector) -> f64, w: &Vector, d: &Vector, step: f64) -> f64 {
    (f(&(w + d * step)) - f(&(w - d * step))) / (2.0 * step)
}

/// Projection onto `{u in [0,1]^m : sum u = tau}` by enumerating every
/// assignment of coordinates to {lower bound, free, upper bound}.
pub fn capped_simplex_bruteforce(v: &Vector, tau: f64) -> Result<Vector, OracleError> {
    let m = v.len();
    if m > 12 {
        return Err(OracleError::DimensionCap(m));
    }
    const EPS: f64 = 1e-12;
    let mut best: Option<(f64, Vector)> = None;
    let mut pattern = vec![0u8; m];
    let total = 3usize.pow(m as u32);
    for code in 0..total {
        let mut c = code;
        for p in pattern.iter_mut() {
            *p = (c % 3) as u8;
            c /= 3;
        }
        let ones = pattern.iter().filter(|&&p| p == 2).count() as f64;
        let free: Vec<usize> = (0..m).filter(|&i| pattern[i] == 1).collect();
        let mut u = Vector::from_iterator(m, pattern.iter().map(|&p| if p == 2 { 1.0 } else { 0.0 }));
        if free.is_empty() {
            if (ones - tau).abs() > EPS {
                continue;
            }
        } else {
            let theta = (free.iter().map(|&i| v[i]).sum::<f64>() + ones - tau) / free.len() as f64;
            let mut ok = true;
            for &i in &free {
                let x = v[i] - theta;
                if !(-EPS..=1.0 + EPS).contains(&x) {
                    ok = false;
                    break;
                }
                u[i] = x.clamp(0.0, 1.0);
            }
            if !ok {
                continue;
            }
        }
        let d = (&u - v).norm_squared();
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, u));
        }
    }
    best.map(|(_, u)| u).ok_or(OracleError::Infeasible(tau))
}

fn soft(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// High-precision least absolute deviations `min ||Ax - b||_1`.
///
/// Scaled ADMM with `rho = 1` on `Ax - b = z` until both residuals are at
/// most `tol`, followed by a vertex polish: the `n` smallest residuals are
/// set to zero by an exact square solve, kept if it does not raise the
/// objective. Returns `(x, objective)`.
pub fn lad_reference(a: &Matrix, b: &Vector, tol: f64) -> Result<(Vector, f64), OracleError> {
    const CAP: usize = 1_000_000;
    let (m, n) = a.shape();
    if b.len() != m || m < n {
        return Err(OracleError::Dimension);
    }
    let at = a.transpose();
    let chol = (&at * a).cholesky().ok_or(OracleError::Singular)?;
    let mut x = chol.solve(&(&at * b));
    let mut z = a * &x - b;
    let mut u = Vector::zeros(m);
    let mut converged = false;
    for _ in 0..CAP {
        x = chol.solve(&(&at * (b + &z - &u)));
        let ax_b = a * &x - b;
        let z_prev = z.clone();
        z = (&ax_b + &u).map(|t| soft(t, 1.0));
        let r = &ax_b - &z;
        u += &r;
        let dual = (&at * (&z - &z_prev)).norm();
        if r.norm() <= tol && dual <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(OracleError::IterationCap(CAP));
    }
    let objective = |x: &Vector| (a * x - b).abs().sum();
    let mut best = objective(&x);
    let r = a * &x - b;
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&i, &j| r[i].abs().total_cmp(&r[j].abs()));
    let rows: Vec<usize> = idx[..n].to_vec();
    let sub = Matrix::from_fn(n, n, |i, j| a[(rows[i], j)]);
    let rhs = Vector::from_iterator(n, rows.iter().map(|&i| b[i]));
    if let Some(xv) = sub.lu().solve(&rhs) {
        let ov = objective(&xv);
        if ov <= best {
            best = ov;
            x = xv;
        }
    }
    Ok((x, best))
}

/// Smallest `||A^T s||` over subgradients `s` of `||. - b||_1` at `Ax`.
///
/// Residuals with `|r_i| <= zero_tol` get a free `s_i in [-1, 1]`, chosen by
/// box-constrained least squares (projected gradient).
pub fn lad_certificate(a: &Matrix, b: &Vector, x: &Vector, zero_tol: f64) -> f64 {
    let r = a * x - b;
    let m = r.len();
    let free: Vec<usize> = (0..m).filter(|&i| r[i].abs() <= zero_tol).collect();
    let mut s = r.map(|t| if t > 0.0 { 1.0 } else if t < 0.0 { -1.0 } else { 0.0 });
    for &i in &free {
        s[i] = 0.0;
    }
    if free.is_empty() {
        return (a.transpose() * s).norm();
    }
    let fixed = a.transpose() * &s;
    let af = Matrix::from_fn(free.len(), a.ncols(), |i, j| a[(free[i], j)]);
    // minimize ||fixed + af^T t||^2 over t in [-1,1]^|free|
    let aft = af.transpose();
    let lip = (&af * &aft).symmetric_eigenvalues().max().max(1e-300);
    let mut t = Vector::zeros(free.len());
    if let Some(t0) = (&af * &aft).clone().pseudo_inverse(1e-12).ok().map(|p| p * (&af * -&fixed)) {
        t = t0.map(|v| v.clamp(-1.0, 1.0));
    }
    for _ in 0..20_000 {
        let resid = &fixed + &aft * &t;
        let grad = &af * &resid;
        let t_new = (&t - grad / lip).map(|v| v.clamp(-1.0, 1.0));
        if (&t_new - &t).norm() <= 1e-15 {
            t = t_new;
            break;
        }
        t = t_new;
    }
    (&fixed + &aft * &t).norm()
}

/// Checks `p_k - p_{k-1} <= -(nu/2) T_k + slack` at every step of a
/// proximal-gradient trace, where `T_k` is the recorded witness and the
/// slack is `1e-9 (1 + |p_0|)`.
///
/// The report's artifact value is the worst excess over the bound.
pub fn descent_auditor(trace: &SolverTrace, nu: f64) -> OracleReport {
    let rows = &trace.rows;
    let p0 = rows.first().map_or(0.0, |r| r.objective);
    let slack = 1e-9 * (1.0 + p0.abs());
    let mut worst = f64::NEG_INFINITY;
    let mut first = None;
    for k in 1..rows.len() {
        let excess = rows[k].objective - rows[k - 1].objective + 0.5 * nu * rows[k].optimality;
        let bad = !(excess <= slack);
        if bad && first.is_none() {
            first = Some(rows[k].iter);
        }
        if excess > worst || excess.is_nan() {
            worst = excess;
        }
    }
    if rows.len() < 2 {
        worst = 0.0;
    }
    OracleReport {
        quantity: "descent".into(),
        oracle: 0.0,
        artifact: worst,
        abs_gap: worst.max(0.0),
        rel_gap: worst.max(0.0),
        tolerance: slack,
        pass: first.is_none(),
        first_violation: first,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relax::TraceRow;

    #[test]
    fn fd_on_quadratic_and_linear() {
        let w = Vector::from_vec(vec![0.5, -1.0, 2.0]);
        let g = finite_difference_grad(|v| 0.5 * v.norm_squared(), &w, 1e-4);
        assert!((g - &w).norm() < 1e-8);
        let c = Vector::from_vec(vec![3.0, -2.0, 0.25]);
        let g = finite_difference_grad(|v| c.dot(v), &w, 1e-3);
        assert!((g - c).norm() < 1e-12);
    }

    #[test]
    fn bruteforce_small_cases() {
        assert_eq!(capped_simplex_bruteforce(&Vector::from_vec(vec![0.2]), 1.0).unwrap().as_slice(), &[1.0]);
        let u = capped_simplex_bruteforce(&Vector::from_vec(vec![0.6, 0.6]), 1.0).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-15 && (u[1] - 0.5).abs() < 1e-15);
        assert!(capped_simplex_bruteforce(&Vector::zeros(13), 1.0).is_err());
    }

    #[test]
    fn lad_in_range_has_zero_objective() {
        let a = Matrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, -1.0]);
        let xt = Vector::from_vec(vec![2.0, -1.0]);
        let b = &a * &xt;
        let (x, obj) = lad_reference(&a, &b, 1e-12).unwrap();
        assert!(obj < 1e-10);
        assert!((x - xt).norm() < 1e-9);
    }

    #[test]
    fn lad_median_regression() {
        // n = 1 with a = 1: the minimizer is the median
        let a = Matrix::from_element(5, 1, 1.0);
        let b = Vector::from_vec(vec![3.0, -1.0, 10.0, 0.5, 2.0]);
        let (x, obj) = lad_reference(&a, &b, 1e-12).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-9);
        assert!((obj - 13.5).abs() < 1e-9);
        assert!(lad_certificate(&a, &b, &x, 1e-9) < 1e-9);
    }

    fn row(iter: usize, objective: f64, optimality: f64) -> TraceRow {
        TraceRow { iter, objective, optimality, gap: 0.0, inner_iters: 0, ms: 0.0 }
    }

    #[test]
    fn auditor_constant_trace_passes() {
        let t = SolverTrace { nu: 1.0, rows: vec![row(0, 1.0, f64::NAN), row(1, 1.0, 0.0), row(2, 1.0, 0.0)] };
        assert!(descent_auditor(&t, 1.0).pass);
    }

    #[test]
    fn auditor_flags_bumped_row() {
        let t = SolverTrace {
            nu: 1.0,
            rows: vec![row(0, 4.0, f64::NAN), row(1, 3.0, 1.0), row(2, 3.5, 0.1), row(3, 3.0, 0.5)],
        };
        let r = descent_auditor(&t, 1.0);
        assert!(!r.pass);
        assert_eq!(r.first_violation, Some(2));
    }

    #[test]
    fn audit_csv_appends() {
        let dir = std::env::temp_dir().join(format!("rsplit-audit-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("audit.csv");
        let _ = std::fs::remove_file(&path);
        let r = OracleReport::compare("x", 1.0, 1.0 + 1e-12, 1e-9);
        append_audit_csv(&path, &[r.clone()]).unwrap();
        append_audit_csv(&path, &[r]).unwrap();
        let s = std::fs::read_to_string(&path).unwrap();
        assert_eq!(s.lines().count(), 3);
        assert!(s.starts_with(OracleReport::CSV_HEADER));
    }
}
