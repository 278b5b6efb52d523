//! The autoencoder objective.

use ndarray::Array2;

/// Reconstruction loss: mean squared row-norm feature error plus a
/// `lambda`-weighted mean binary cross-entropy over adjacency entries.
/// `lambda = 0` reproduces the literal feature-only objective.
pub fn gae_loss(
    x: &Array2<f64>,
    x_hat: &Array2<f64>,
    a: &Array2<f64>,
    a_hat: &Array2<f64>,
    lambda: f64,
) -> f64 {
    assert_eq!(x.dim(), x_hat.dim());
    let n = x.nrows() as f64;
    let mse = (x - x_hat).mapv(|d| d * d).sum() / n;
    if lambda == 0.0 {
        return mse;
    }
    assert_eq!(a.dim(), a_hat.dim());
    let count = (a.nrows() * a.ncols()) as f64;
    let eps = 1e-12;
    let bce = -a
        .iter()
        .zip(a_hat.iter())
        .map(|(&t, &p)| {
            let p = p.clamp(eps, 1.0 - eps);
            t * p.ln() + (1.0 - t) * (1.0 - p).ln()
        })
        .sum::<f64>()
        / count;
    mse + lambda * bce
}
