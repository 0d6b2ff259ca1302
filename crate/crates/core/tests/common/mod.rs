#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rsplit::{Matrix, Vector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| r.sample(StandardNormal))
}

pub fn gaussian_vector(r: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| r.sample(StandardNormal))
}

pub fn random_signs(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| if r.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// `b = A x_t + 0.1 noise`, with a tenth of the entries shifted by +-10.
pub fn lad_data(seed: u64, m: usize, n: usize) -> (Matrix, Vector) {
    let mut r = rng(seed);
    let a = gaussian_matrix(&mut r, m, n);
    let xt = gaussian_vector(&mut r, n);
    let mut b = &a * xt;
    for i in 0..m {
        b[i] += 0.1 * r.sample::<f64, _>(StandardNormal);
        if r.random::<f64>() < 0.1 {
            b[i] += if r.random::<bool>() { 10.0 } else { -10.0 };
        }
    }
    (a, b)
}
