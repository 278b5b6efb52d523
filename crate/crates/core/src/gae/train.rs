//! Autoencoder training: masked-feature reconstruction with an optional
//! adjacency term, optimized by tape gradients.

use ndarray::Array2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gae::{attention_adjacency, forward, GaeConfig, GaeModel, Nonlinearity};
use crate::nn::{mse_rows, Optimizer, Tape, Var};

/// Raw per-epoch losses and their running-minimum smoothing.
#[derive(Debug, Clone, Default)]
pub struct LossCurve {
    pub raw: Vec<f64>,
    pub smoothed: Vec<f64>,
}

impl LossCurve {
    fn push(&mut self, loss: f64) {
        let smoothed = self.smoothed.last().map_or(loss, |&p| p.min(loss));
        self.raw.push(loss);
        self.smoothed.push(smoothed);
    }
}

/// Result of [`train_gae`].
#[derive(Debug, Clone)]
pub struct GaeTraining {
    pub model: GaeModel,
    /// Structural embeddings from a full (unmasked) forward pass.
    pub z: Array2<f64>,
    pub curve: LossCurve,
}

fn apply_nonlinearity(t: &mut Tape, v: Var, nl: Nonlinearity) -> Var {
    match nl {
        Nonlinearity::Elu => t.elu(v, 1.0),
        Nonlinearity::Relu => t.relu(v),
        Nonlinearity::Identity => v,
    }
}

/// Tape forward of the whole autoencoder; returns the training loss node.
///
/// `param_vars` must align with `model.params()` order.
fn loss_on_tape(
    t: &mut Tape,
    model: &GaeModel,
    param_vars: &[Var],
    x_input: &Array2<f64>,
    x_target: &Array2<f64>,
    adj_mask: &Array2<f64>,
    a_target: &Array2<f64>,
    lambda: f64,
) -> Var {
    let n = x_input.nrows();
    let mut h = t.leaf(x_input.clone());
    for (li, layer) in model.layers.iter().enumerate() {
        let w = param_vars[3 * li];
        let a_left = param_vars[3 * li + 1];
        let a_right = param_vars[3 * li + 2];
        let hw = t.matmul(h, w);
        let f = t.matmul(hw, a_left);
        let g = t.matmul(hw, a_right);
        let fb = t.broadcast_col(f, n);
        let gt = t.transpose(g);
        let gb = t.broadcast_row(gt, n);
        let e = t.add(fb, gb);
        let el = t.leaky_relu(e, layer.leaky_slope);
        let ex = t.exp(el);
        let em = t.mul_mask(ex, adj_mask.clone());
        let s = t.row_sum(em);
        let sb = t.broadcast_col(s, n);
        let alpha = t.div(em, sb);
        let agg = t.matmul(alpha, hw);
        h = apply_nonlinearity(t, agg, model.nonlinearity);
    }
    let z = h;
    let dec_w = param_vars[param_vars.len() - 2];
    let dec_b = param_vars[param_vars.len() - 1];
    let zw = t.matmul(z, dec_w);
    let bb = t.broadcast_row(dec_b, n);
    let x_hat = t.add(zw, bb);
    let mse = mse_rows(t, x_hat, x_target);
    if lambda == 0.0 {
        return mse;
    }
    let zt = t.transpose(z);
    let logits = t.matmul(z, zt);
    let bce = t.bce_with_logits_mean(logits, a_target.clone());
    let weighted = t.mul_scalar(bce, lambda);
    t.add(mse, weighted)
}

fn build_tape(
    model: &GaeModel,
    x_input: &Array2<f64>,
    x_target: &Array2<f64>,
    adj_mask: &Array2<f64>,
    a_target: &Array2<f64>,
) -> (Tape, Vec<Var>, Var) {
    let mut t = Tape::new();
    let param_vars: Vec<Var> = model.params().iter().map(|p| t.leaf((*p).clone())).collect();
    let loss = loss_on_tape(
        &mut t,
        model,
        &param_vars,
        x_input,
        x_target,
        adj_mask,
        a_target,
        model.lambda,
    );
    (t, param_vars, loss)
}

/// Training loss for one fixed masked input (no update).
pub fn gae_step_loss(
    model: &GaeModel,
    x_input: &Array2<f64>,
    x_target: &Array2<f64>,
    adj_mask: &Array2<f64>,
    a_target: &Array2<f64>,
) -> f64 {
    let (t, _, loss) = build_tape(model, x_input, x_target, adj_mask, a_target);
    t.scalar(loss)
}

/// Training loss and analytic parameter gradients in `model.params()` order.
pub fn gae_step_grads(
    model: &GaeModel,
    x_input: &Array2<f64>,
    x_target: &Array2<f64>,
    adj_mask: &Array2<f64>,
    a_target: &Array2<f64>,
) -> (f64, Vec<Array2<f64>>) {
    let (t, param_vars, loss) = build_tape(model, x_input, x_target, adj_mask, a_target);
    let grads = t.backward(loss);
    let out = param_vars
        .iter()
        .zip(model.params())
        .map(|(v, p)| {
            grads
                .get(*v)
                .cloned()
                .unwrap_or_else(|| Array2::zeros(p.dim()))
        })
        .collect();
    (t.scalar(loss), out)
}

/// Train the autoencoder on node features `x` and binary adjacency `a`.
///
/// Per epoch a fresh random feature mask zeroes `mask_rate` of input entries;
/// the loss reconstructs the full features (and, with `lambda > 0`, the
/// adjacency as seen by the encoder). Deterministic for a fixed seed.
pub fn train_gae(
    x: &Array2<f64>,
    a: &Array2<f64>,
    cfg: &GaeConfig,
    seed: u64,
) -> Result<GaeTraining> {
    cfg.validate()?;
    let n = x.nrows();
    if n < 2 {
        return Err(Error::InvalidConfig(
            "autoencoder training needs at least 2 nodes".into(),
        ));
    }
    let adj_mask = attention_adjacency(a, cfg.self_loops);
    for u in 0..n {
        if (0..n).all(|v| adj_mask[(u, v)] == 0.0) {
            return Err(Error::IsolatedNode(format!("node index {u}")));
        }
    }
    let a_target = adj_mask.clone();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = GaeModel::init(cfg, x.ncols(), &mut rng);
    let mut opt = Optimizer::new(cfg.optimizer, cfg.step_size);
    let mut curve = LossCurve::default();

    for epoch in 0..cfg.epochs {
        let keep = Array2::from_shape_fn(x.dim(), |_| {
            if rng.random_range(0.0..1.0) < cfg.mask_rate {
                0.0
            } else {
                1.0
            }
        });
        let x_input = x * &keep;
        let (loss, grads) = gae_step_grads(&model, &x_input, x, &adj_mask, &a_target);
        if !loss.is_finite() {
            return Err(Error::Divergence {
                stage: "gae",
                epoch,
                loss,
            });
        }
        opt.step(&mut model.params_mut(), &grads);
        curve.push(loss);
    }

    let z = forward::gat_forward(&model, x, &adj_mask)?
        .pop()
        .expect("k >= 1");
    Ok(GaeTraining { model, z, curve })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::OptimizerKind;
    use rand::Rng;

    fn ring_graph(n: usize) -> Array2<f64> {
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            let j = (i + 1) % n;
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    fn small_cfg() -> GaeConfig {
        GaeConfig {
            layers: 2,
            hidden_dim: 6,
            embedding_dim: 4,
            epochs: 40,
            step_size: 0.02,
            optimizer: OptimizerKind::Adam,
            ..GaeConfig::default()
        }
    }

    #[test]
    fn zero_epochs_returns_initialized_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = Array2::from_shape_fn((6, 5), |_| rng.random_range(0.0..1.0));
        let a = ring_graph(6);
        let cfg = GaeConfig {
            epochs: 0,
            ..small_cfg()
        };
        let trained = train_gae(&x, &a, &cfg, 7).unwrap();
        let mut init_rng = ChaCha8Rng::seed_from_u64(7);
        let fresh = GaeModel::init(&cfg, 5, &mut init_rng);
        assert_eq!(trained.model.flatten(), fresh.flatten());
        assert!(trained.curve.raw.is_empty());
    }

    #[test]
    fn same_seed_same_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Array2::from_shape_fn((8, 5), |_| rng.random_range(0.0..1.0));
        let a = ring_graph(8);
        let cfg = small_cfg();
        let t1 = train_gae(&x, &a, &cfg, 42).unwrap();
        let t2 = train_gae(&x, &a, &cfg, 42).unwrap();
        assert_eq!(t1.model.flatten(), t2.model.flatten());
        assert_eq!(t1.curve.raw, t2.curve.raw);
        assert_eq!(t1.z, t2.z);
    }

    #[test]
    fn training_reduces_loss() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Array2::from_shape_fn((10, 6), |_| rng.random_range(0.0..1.0));
        let a = ring_graph(10);
        let trained = train_gae(&x, &a, &small_cfg(), 5).unwrap();
        let first = trained.curve.raw[0];
        let last = *trained.curve.smoothed.last().unwrap();
        assert!(last < first, "loss did not drop: {first} -> {last}");
    }

    #[test]
    fn smoothed_curve_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Array2::from_shape_fn((6, 4), |_| rng.random_range(0.0..1.0));
        let a = ring_graph(6);
        let trained = train_gae(&x, &a, &small_cfg(), 9).unwrap();
        for w in trained.curve.smoothed.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 4;
        let d = 3;
        let x = Array2::from_shape_fn((n, d), |_| rng.random_range(0.0..1.0));
        let a = ring_graph(n);
        let cfg = GaeConfig {
            layers: 2,
            hidden_dim: 3,
            embedding_dim: 2,
            ..GaeConfig::default()
        };
        let mut model = GaeModel::init(&cfg, d, &mut rng);
        model.lambda = 1.0;
        let adj_mask = attention_adjacency(&a, true);
        let a_target = adj_mask.clone();

        let (_, grads) = gae_step_grads(&model, &x, &x, &adj_mask, &a_target);
        let analytic: Vec<f64> = grads.iter().flat_map(|g| g.iter().copied()).collect();

        let flat = model.flatten();
        let h = 1e-5;
        for (k, &base) in flat.iter().enumerate() {
            let mut plus = flat.clone();
            plus[k] = base + h;
            let mut m2 = model.clone();
            m2.assign_flat(&plus);
            let lp = gae_step_loss(&m2, &x, &x, &adj_mask, &a_target);
            let mut minus = flat.clone();
            minus[k] = base - h;
            m2.assign_flat(&minus);
            let lm = gae_step_loss(&m2, &x, &x, &adj_mask, &a_target);
            let fd = (lp - lm) / (2.0 * h);
            let denom = fd.abs().max(analytic[k].abs()).max(1e-8);
            assert!(
                (fd - analytic[k]).abs() / denom < 1e-4,
                "param {k}: fd {fd} vs analytic {}",
                analytic[k]
            );
        }
    }
}
