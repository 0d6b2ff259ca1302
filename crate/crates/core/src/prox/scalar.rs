//! Scalar proximal kernels `argmin_w (1/(2 mu)) (w - v)^2 + h(w)`.

const NEWTON_MAX_ITER: usize = 50;

#[inline]
fn sign_nonneg(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `1 / (1 + e^w)` without overflow.
#[inline]
pub(crate) fn inv_one_plus_exp(w: f64) -> f64 {
    if w >= 0.0 {
        let e = (-w).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + w.exp())
    }
}

/// `log(1 + e^{-z})` without overflow.
#[inline]
pub(crate) fn log1p_exp_neg(z: f64) -> f64 {
    if z >= 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// Soft-threshold toward `b`: prox of `|w - b|`.
pub fn prox_abs_deviation(v: f64, mu: f64, b: f64) -> f64 {
    let r = v - b;
    if r.abs() <= mu {
        b
    } else {
        v - mu * r.signum()
    }
}

/// Prox of `|w - b| + (alpha/2)(w - b)^2`.
pub fn prox_elastic_deviation(v: f64, mu: f64, b: f64, alpha: f64) -> f64 {
    let r = v - b;
    if r.abs() <= mu {
        b
    } else {
        b + (r - mu * r.signum()) / (1.0 + alpha * mu)
    }
}

/// Global prox of the nonconvex `||w| - b|`.
///
/// The objective is even under `(w, v) -> (-w, -v)`, so the kernel solves the
/// half-line problem for `|v|` and restores the sign; `v = 0` maps to the
/// nonnegative candidate.
pub fn prox_modulus_deviation(v: f64, mu: f64, b: f64) -> f64 {
    let t = v.abs();
    let obj = |w: f64| (w - t) * (w - t) / (2.0 * mu) + (w - b).abs();
    let mut best = b;
    let mut best_obj = obj(b);
    let mut consider = |w: f64| {
        let o = obj(w);
        if o < best_obj || (o == best_obj && w > best) {
            best = w;
            best_obj = o;
        }
    };
    consider(0.0);
    if t - mu > b {
        consider(t - mu);
    }
    if t + mu < b {
        consider(t + mu);
    }
    sign_nonneg(v) * best
}

/// Prox of `(1/2)(|w| - b)^2`, the residual used by trimmed phase retrieval.
pub fn prox_squared_modulus_deviation(v: f64, mu: f64, b: f64) -> f64 {
    sign_nonneg(v) * (v.abs() + mu * b) / (1.0 + mu)
}

/// Safeguarded Newton on an increasing function with a sign change on
/// `[lo, hi]`.
fn bracketed_newton(f: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64, x0: f64, tol: f64) -> f64 {
    let mut x = x0.clamp(lo, hi);
    for _ in 0..NEWTON_MAX_ITER {
        let (fx, dfx) = f(x);
        if fx.abs() <= tol {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
    }
    x
}

/// Prox of `log(1 + exp(-label * w))`, `label` in `{-1, +1}`.
pub fn prox_logistic(v: f64, mu: f64, label: f64) -> f64 {
    if label < 0.0 {
        return -prox_logistic(-v, mu, 1.0);
    }
    // (w - v)/mu - 1/(1 + e^w) = 0 has its root in [v, v + mu]
    let tol = 1e-13 * (1.0 + v.abs() / mu);
    let f = |w: f64| {
        let s = inv_one_plus_exp(w);
        ((w - v) / mu - s, 1.0 / mu + s * (1.0 - s))
    };
    bracketed_newton(f, v, v + mu, v + mu * inv_one_plus_exp(v), tol)
}

/// Prox of the nonconvex `log(1 + exp(-|w|))`; the minimizer shares the
/// sign of `v` (with `sign(0) = +1`).
pub fn prox_symmetric_logistic(v: f64, mu: f64) -> f64 {
    let s = v.abs();
    // root of (t - s)/mu - 1/(1 + e^t) on [s, s + mu/2]
    let tol = 1e-13 * (1.0 + s / mu);
    let f = |t: f64| {
        let q = inv_one_plus_exp(t);
        ((t - s) / mu - q, 1.0 / mu + q * (1.0 - q))
    };
    let t = bracketed_newton(f, s, s + 0.5 * mu, s + mu * inv_one_plus_exp(s), tol);
    sign_nonneg(v) * t
}

/// Global prox of `|min(z1 + a, z2 + b)|` over the pair `(z1, z2)`.
///
/// Candidates: the first argument active (1-D soft-threshold, second left at
/// its input), the second active, and the seam `z1 + a = z2 + b`. Ties go to
/// the lexicographically smaller pair.
pub fn prox_min_abs_pair(v1: f64, v2: f64, mu: f64, a: f64, b: f64) -> (f64, f64) {
    let p0 = v1 + a;
    let q0 = v2 + b;
    let obj = |z1: f64, z2: f64| {
        let (p, q) = (z1 + a, z2 + b);
        ((z1 - v1).powi(2) + (z2 - v2).powi(2)) / (2.0 * mu) + p.min(q).abs()
    };
    let mut cands: Vec<(f64, f64)> = Vec::with_capacity(3);
    let z1 = prox_abs_deviation(v1, mu, -a);
    if z1 + a <= q0 {
        cands.push((z1, v2));
    }
    let z2 = prox_abs_deviation(v2, mu, -b);
    if z2 + b <= p0 {
        cands.push((v1, z2));
    }
    let s = prox_abs_deviation(0.5 * (p0 + q0), 0.5 * mu, 0.0);
    cands.push((s - a, s - b));

    let mut best = cands[0];
    let mut best_obj = obj(best.0, best.1);
    for &c in &cands[1..] {
        let o = obj(c.0, c.1);
        if o < best_obj || (o == best_obj && (c.0, c.1) < best) {
            best = c;
            best_obj = o;
        }
    }
    best
}
