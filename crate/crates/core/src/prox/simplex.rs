//! Euclidean projection onto the capped simplex `{u in [0,1]^m : sum u = tau}`.

use super::ProxError;
use crate::Vector;

fn shifted_sum(v: &Vector, theta: f64) -> f64 {
    v.iter().map(|&x| (x - theta).clamp(0.0, 1.0)).sum()
}

/// Projects `v` onto the capped simplex with budget `tau`.
///
/// `u_i = clip(v_i - theta, 0, 1)` with the shift found by bisection on
/// `[min v - 1, max v]`, then recomputed exactly from the free set.
pub fn project_capped_simplex(v: &Vector, tau: f64) -> Result<Vector, ProxError> {
    let m = v.len();
    if !(tau >= 0.0 && tau <= m as f64) {
        return Err(ProxError::InfeasibleBudget { tau, m });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(ProxError::BadParameter("non-finite input to capped-simplex projection".into()));
    }
    if tau == m as f64 {
        return Ok(Vector::from_element(m, 1.0));
    }
    if tau == 0.0 {
        return Ok(Vector::zeros(m));
    }
    let mut lo = v.min() - 1.0;
    let mut hi = v.max();
    // shifted_sum is non-increasing in theta: m at lo, 0 at hi
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if shifted_sum(v, mid) > tau {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut theta = 0.5 * (lo + hi);
    for _ in 0..4 {
        let (mut free_sum, mut free, mut ones) = (0.0, 0usize, 0usize);
        for &x in v.iter() {
            let s = x - theta;
            if s >= 1.0 {
                ones += 1;
            } else if s > 0.0 {
                free += 1;
                free_sum += x;
            }
        }
        if free == 0 {
            break;
        }
        let exact = (free_sum + ones as f64 - tau) / free as f64;
        if exact == theta {
            break;
        }
        theta = exact;
    }
    let mut u = v.map(|x| (x - theta).clamp(0.0, 1.0));
    // distribute any rounding residue over the free coordinates
    let resid = tau - u.sum();
    if resid != 0.0 {
        let free: Vec<usize> = (0..m).filter(|&i| u[i] > 0.0 && u[i] < 1.0).collect();
        if !free.is_empty() {
            let d = resid / free.len() as f64;
            for i in free {
                u[i] = (u[i] + d).clamp(0.0, 1.0);
            }
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasible_point_is_fixed() {
        let v = Vector::from_vec(vec![0.2, 0.5, 0.3, 1.0]);
        let u = project_capped_simplex(&v, 2.0).unwrap();
        assert!((u - v).norm() < 1e-12);
    }

    #[test]
    fn clamp_dominates() {
        let u = project_capped_simplex(&Vector::from_vec(vec![2.0, 0.0]), 1.0).unwrap();
        assert_eq!(u.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn extremes_and_infeasible() {
        let v = Vector::from_vec(vec![0.3, -2.0, 5.0]);
        assert_eq!(project_capped_simplex(&v, 3.0).unwrap().as_slice(), &[1.0; 3]);
        assert_eq!(project_capped_simplex(&v, 0.0).unwrap().as_slice(), &[0.0; 3]);
        assert!(project_capped_simplex(&v, 3.5).is_err());
        assert!(project_capped_simplex(&v, -0.1).is_err());
    }
}
