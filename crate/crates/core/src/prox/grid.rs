//! Brute-force grid minimizer, used as a test oracle.

/// Grid point `w = lo + i step` minimizing `(w - v)^2 / (2 mu) + objective(w)`.
///
/// Points are `lo + i step` for `i = 0..=floor((hi - lo) / step)`, so halving
/// `step` yields a superset of the previous grid. Ties keep the first point.
pub fn grid_prox_oracle(objective: impl Fn(f64) -> f64, v: f64, mu: f64, lo: f64, hi: f64, step: f64) -> f64 {
    assert!(lo < hi && step > 0.0 && mu > 0.0, "invalid grid");
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut best = lo;
    let mut best_obj = f64::INFINITY;
    for i in 0..=count {
        let w = lo + i as f64 * step;
        let o = (w - v) * (w - v) / (2.0 * mu) + objective(w);
        if o < best_obj {
            best = w;
            best_obj = o;
        }
    }
    best
}
