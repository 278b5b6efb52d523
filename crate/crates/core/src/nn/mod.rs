//! Minimal reverse-mode autodiff over dense `f64` matrices, plus parameter
//! initialization and optimizers.
//!
//! Scalars are 1x1 matrices and column vectors are nx1, so every node is an
//! `Array2<f64>`. A fresh tape is built per training step (define-by-run);
//! `backward` walks it once in reverse.

mod init;
mod optim;
mod tape;

pub use init::{xavier, zeros_vec};
pub use optim::Optimizer;
pub use tape::{Grads, Tape, Var};

use ndarray::Array2;

/// Row-wise layer normalization without affine parameters:
/// `(x - mean) / sqrt(var + eps)` per row.
pub fn layer_norm_rows(t: &mut Tape, x: Var, eps: f64) -> Var {
    let (n, d) = t.shape(x);
    debug_assert!(d >= 1);
    let m = t.mul_scalar(t.row_sum(x), 1.0 / d as f64);
    let centered = {
        let mb = t.broadcast_col(m, d);
        t.sub(x, mb)
    };
    let var = {
        let sq = t.mul(centered, centered);
        let s = t.row_sum(sq);
        t.mul_scalar(s, 1.0 / d as f64)
    };
    let denom = {
        let ve = t.add_scalar(var, eps);
        let sd = t.sqrt(ve);
        t.broadcast_col(sd, d)
    };
    let _ = n;
    t.div(centered, denom)
}

/// Rows scaled to unit Euclidean norm. Undefined (NaN) on zero rows; callers
/// guard via the divergence check.
pub fn normalize_rows(t: &mut Tape, x: Var) -> Var {
    let (_, d) = t.shape(x);
    let sq = t.mul(x, x);
    let s = t.row_sum(sq);
    let norm = t.sqrt(s);
    let nb = t.broadcast_col(norm, d);
    t.div(x, nb)
}

/// Mean squared row-norm difference: `(1/n) * sum_i ||x_i - y_i||^2`
/// where `y` is a constant target.
pub fn mse_rows(t: &mut Tape, x: Var, target: &Array2<f64>) -> Var {
    let n = t.shape(x).0;
    let tgt = t.leaf(target.clone());
    let d = t.sub(x, tgt);
    let sq = t.mul(d, d);
    let s = t.sum_all(sq);
    t.mul_scalar(s, 1.0 / n as f64)
}
