//! Block (group) kernels on a vector `d`.

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn scaled(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| s * x).collect()
}

/// Block soft-threshold, the prox of `||d||`.
pub fn prox_group_l2(v: &[f64], mu: f64) -> Vec<f64> {
    let r = norm(v);
    if r <= mu {
        vec![0.0; v.len()]
    } else {
        scaled(v, 1.0 - mu / r)
    }
}

/// Prox of the truncated norm: `||d||` on `||d|| < kappa`, zero on
/// `||d|| >= kappa`.
///
/// Zero at the threshold keeps the penalty lower semicontinuous, so the
/// minimum is attained. Two radial candidates along `v`: the shrunk radius
/// `clamp(r - mu, 0, kappa)` on the penalized side, and `max(r, kappa)` on the
/// free side. Ties go to the free side.
pub fn prox_scad_truncated(v: &[f64], mu: f64, kappa: f64) -> Vec<f64> {
    let r = norm(v);
    if r >= kappa {
        return v.to_vec();
    }
    let shrunk = (r - mu).clamp(0.0, kappa);
    let penalized = (shrunk - r) * (shrunk - r) / (2.0 * mu) + shrunk;
    let free = (kappa - r) * (kappa - r) / (2.0 * mu);
    let rho = if shrunk < kappa && penalized < free { shrunk } else { kappa };
    if r == 0.0 {
        // every direction ties on the free side; take the first axis
        let mut z = vec![0.0; v.len()];
        if rho > 0.0 {
            z[0] = rho;
        }
        return z;
    }
    let mut z = scaled(v, rho / r);
    if rho == kappa {
        // rounding must not leave the point on the penalized side
        while norm(&z) < kappa {
            z = scaled(&z, 1.0 + f64::EPSILON);
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_l2_examples() {
        assert_eq!(prox_group_l2(&[0.3, -0.4], 0.5), vec![0.0, 0.0]);
        let z = prox_group_l2(&[3.0, 4.0], 2.5);
        assert!((z[0] - 1.5).abs() < 1e-15 && (z[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn scad_examples() {
        assert_eq!(prox_scad_truncated(&[30.0, 40.0], 1.0, 2.0), vec![30.0, 40.0]);
        assert_eq!(prox_scad_truncated(&[0.01, 0.0], 0.1, 5.0), vec![0.0, 0.0]);
        // inside kappa, matches the group prox
        let z = prox_scad_truncated(&[1.2, 0.0], 0.5, 3.0);
        assert!((z[0] - 0.7).abs() < 1e-15);
        // just inside kappa, jumping to the free side is cheaper
        let z = prox_scad_truncated(&[0.0, 1.9], 1.0, 2.0);
        assert_eq!(z[0], 0.0);
        assert!(norm(&z) >= 2.0 && (z[1] - 2.0).abs() < 1e-15);
    }
}
