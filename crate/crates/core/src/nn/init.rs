//! Seeded parameter initialization.

use ndarray::Array2;
use rand::Rng;

/// Xavier-uniform initialization.
pub fn xavier<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Array2<f64> {
    let scale = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(-scale..scale))
}

/// 1 x n zero row vector (bias shape).
pub fn zeros_vec(cols: usize) -> Array2<f64> {
    Array2::zeros((1, cols))
}
