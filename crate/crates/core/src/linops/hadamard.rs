use super::LinopError;

/// In-place unnormalized butterfly followed by the `1/sqrt(n)` scaling, so
/// the transform is symmetric and its own inverse.
pub(crate) fn fwht_normalized(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let a = v[i];
                let b = v[i + h];
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    for x in v.iter_mut() {
        *x *= scale;
    }
}

/// Normalized Walsh-Hadamard transform `H_n v`, in `O(n log n)`.
pub fn fast_hadamard(v: &[f64]) -> Result<Vec<f64>, LinopError> {
    let mut out = v.to_vec();
    fast_hadamard_in_place(&mut out)?;
    Ok(out)
}

pub fn fast_hadamard_in_place(v: &mut [f64]) -> Result<(), LinopError> {
    if v.is_empty() || !v.len().is_power_of_two() {
        return Err(LinopError::NotPowerOfTwo(v.len()));
    }
    fwht_normalized(v);
    Ok(())
}
