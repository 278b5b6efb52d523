//! Pure forward passes: attention coefficients, layer stacking, and the
//! inner-product decoder.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::gae::{GaeModel, GatLayerParams};

/// Attention coefficients of one layer over the given adjacency.
///
/// `alpha[u][v]` is the softmax over `v in N(u)` of
/// `LeakyReLU(a([W h_u || W h_v]))`; zero where `a[u][v] == 0`. Every node
/// needs at least one neighbor under `adj` (callers add self-loops first
/// when they want isolated nodes to survive).
pub fn attention_coefficients(
    layer: &GatLayerParams,
    x: &Array2<f64>,
    adj: &Array2<f64>,
) -> Result<Array2<f64>> {
    let n = x.nrows();
    assert_eq!(adj.dim(), (n, n), "adjacency must be n x n");
    let hw = x.dot(&layer.w);
    let f = hw.dot(&layer.a_left);
    let g = hw.dot(&layer.a_right);

    let mut alpha = Array2::zeros((n, n));
    for u in 0..n {
        let neighbors: Vec<usize> = (0..n).filter(|&v| adj[(u, v)] != 0.0).collect();
        if neighbors.is_empty() {
            return Err(Error::IsolatedNode(format!("node index {u}")));
        }
        let logits: Vec<f64> = neighbors
            .iter()
            .map(|&v| {
                let e = f[(u, 0)] + g[(v, 0)];
                if e > 0.0 {
                    e
                } else {
                    layer.leaky_slope * e
                }
            })
            .collect();
        let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|&e| (e - m).exp()).collect();
        let denom: f64 = exps.iter().sum();
        for (&v, &e) in neighbors.iter().zip(&exps) {
            alpha[(u, v)] = e / denom;
        }
    }
    Ok(alpha)
}

/// Stack all attention layers: `h_v = sigma(sum_u alpha_vu W h_u)` per layer.
///
/// `adj` is used as given (no self-loop insertion here). Returns the
/// per-layer outputs; the last entry is the structural embedding `Z`.
pub fn gat_forward(model: &GaeModel, x: &Array2<f64>, adj: &Array2<f64>) -> Result<Vec<Array2<f64>>> {
    let mut outputs = Vec::with_capacity(model.layers.len());
    let mut h = x.clone();
    for layer in &model.layers {
        let alpha = attention_coefficients(layer, &h, adj)?;
        let hw = h.dot(&layer.w);
        let agg = alpha.dot(&hw);
        h = model.nonlinearity.apply(&agg);
        outputs.push(h.clone());
    }
    Ok(outputs)
}

/// Inner-product decoder: `sigmoid(Z Z^T)`, symmetric with entries in (0,1).
pub fn decode_adjacency(z: &Array2<f64>) -> Array2<f64> {
    let zz = z.dot(&z.t());
    zz.mapv(|v| 1.0 / (1.0 + (-v).exp()))
}

/// Feature readout from embeddings.
pub(crate) fn decode_features(model: &GaeModel, z: &Array2<f64>) -> Array2<f64> {
    let mut out = z.dot(&model.decoder_w);
    for mut row in out.rows_mut() {
        row += &model.decoder_b.row(0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gae::{attention_adjacency, GaeConfig, Nonlinearity};
    use ndarray::array;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn layer_from(w: Array2<f64>, al: Array2<f64>, ar: Array2<f64>) -> GatLayerParams {
        GatLayerParams {
            w,
            a_left: al,
            a_right: ar,
            leaky_slope: 0.2,
        }
    }

    fn random_layer(in_dim: usize, out_dim: usize, seed: u64) -> GatLayerParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GatLayerParams::init(in_dim, out_dim, 0.2, &mut rng)
    }

    /// Direct re-computation of the two attention formulas, kept separate
    /// from the implementation on purpose.
    fn attention_oracle(
        layer: &GatLayerParams,
        x: &Array2<f64>,
        adj: &Array2<f64>,
    ) -> Array2<f64> {
        let n = x.nrows();
        let d = layer.w.ncols();
        let mut alpha = Array2::zeros((n, n));
        for u in 0..n {
            let mut terms: Vec<(usize, f64)> = Vec::new();
            for v in 0..n {
                if adj[(u, v)] == 0.0 {
                    continue;
                }
                // e_uv = a([W h_u || W h_v]) with a = [a_left; a_right]
                let mut e = 0.0;
                for k in 0..d {
                    let whu: f64 = (0..x.ncols()).map(|c| x[(u, c)] * layer.w[(c, k)]).sum();
                    let whv: f64 = (0..x.ncols()).map(|c| x[(v, c)] * layer.w[(c, k)]).sum();
                    e += layer.a_left[(k, 0)] * whu + layer.a_right[(k, 0)] * whv;
                }
                let e = if e > 0.0 { e } else { layer.leaky_slope * e };
                terms.push((v, e.exp()));
            }
            let denom: f64 = terms.iter().map(|(_, t)| t).sum();
            for (v, t) in terms {
                alpha[(u, v)] = t / denom;
            }
        }
        alpha
    }

    #[test]
    fn singleton_neighborhood_gets_weight_one() {
        let x = array![[1.0], [2.0]];
        let adj = array![[0.0, 1.0], [1.0, 0.0]];
        let layer = random_layer(1, 3, 9);
        let alpha = attention_coefficients(&layer, &x, &adj).unwrap();
        assert!((alpha[(0, 1)] - 1.0).abs() < 1e-12);
        assert!((alpha[(1, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_neighbors_split_evenly() {
        let x = array![[1.0], [3.0], [3.0]];
        let adj = array![
            [0.0, 1.0, 1.0],
            [1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0]
        ];
        let layer = random_layer(1, 4, 4);
        let alpha = attention_coefficients(&layer, &x, &adj).unwrap();
        assert!((alpha[(0, 1)] - 0.5).abs() < 1e-12);
        assert!((alpha[(0, 2)] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_graphs_match_oracle_and_rows_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..25 {
            let n = rng.random_range(2..=6);
            let d_in = rng.random_range(1..=4);
            let mut adj = Array2::zeros((n, n));
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random_range(0.0..1.0) < 0.6 {
                        adj[(i, j)] = 1.0;
                        adj[(j, i)] = 1.0;
                    }
                }
            }
            let adj = attention_adjacency(&adj, true);
            let x = Array2::from_shape_fn((n, d_in), |_| rng.random_range(-1.0..1.0));
            let layer = random_layer(d_in, 3, 100 + case);
            let alpha = attention_coefficients(&layer, &x, &adj).unwrap();
            let want = attention_oracle(&layer, &x, &adj);
            for u in 0..n {
                let row_sum: f64 = (0..n).map(|v| alpha[(u, v)]).sum();
                assert!((row_sum - 1.0).abs() < 1e-6, "case {case} row {u}");
                for v in 0..n {
                    assert!((alpha[(u, v)] - want[(u, v)]).abs() < 1e-6);
                    if adj[(u, v)] == 0.0 {
                        assert_eq!(alpha[(u, v)], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn isolated_node_errors_without_self_loops() {
        let x = array![[1.0], [2.0], [3.0]];
        let adj = array![
            [0.0, 1.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0]
        ];
        let layer = random_layer(1, 2, 5);
        assert!(matches!(
            attention_coefficients(&layer, &x, &adj),
            Err(Error::IsolatedNode(_))
        ));
    }

    #[test]
    fn single_edge_output_depends_only_on_neighbor() {
        // without self-loops, h_s aggregates only h_r
        let layer = layer_from(array![[1.0]], array![[0.3]], array![[0.7]]);
        let model = GaeModel {
            layers: vec![layer],
            decoder_w: array![[1.0]],
            decoder_b: array![[0.0]],
            lambda: 0.0,
            nonlinearity: Nonlinearity::Identity,
            self_loops: false,
        };
        let adj = array![[0.0, 1.0], [1.0, 0.0]];
        let out_a = gat_forward(&model, &array![[5.0], [2.0]], &adj).unwrap();
        let out_b = gat_forward(&model, &array![[100.0], [2.0]], &adj).unwrap();
        // h_s = alpha_sr * W h_r = h_r regardless of h_s
        assert_eq!(out_a.last().unwrap()[(0, 0)], 2.0);
        assert_eq!(out_b.last().unwrap()[(0, 0)], 2.0);
    }

    #[test]
    fn zero_weights_give_sigma_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = GaeConfig {
            layers: 2,
            hidden_dim: 4,
            embedding_dim: 3,
            ..GaeConfig::default()
        };
        let mut model = GaeModel::init(&cfg, 2, &mut rng);
        for l in &mut model.layers {
            l.w.fill(0.0);
        }
        let x = array![[1.0, 2.0], [3.0, 4.0]];
        let adj = array![[1.0, 1.0], [1.0, 1.0]];
        let z = gat_forward(&model, &x, &adj).unwrap().pop().unwrap();
        assert!(z.iter().all(|&v| v == 0.0)); // ELU(0) = 0
    }

    /// Dense brute-force evaluation of the layer recurrence.
    fn forward_oracle(model: &GaeModel, x: &Array2<f64>, adj: &Array2<f64>) -> Array2<f64> {
        let mut h = x.clone();
        for layer in &model.layers {
            let alpha = attention_oracle(layer, &h, adj);
            let d = layer.w.ncols();
            let n = h.nrows();
            let mut next = Array2::zeros((n, d));
            for v in 0..n {
                for k in 0..d {
                    let mut acc = 0.0;
                    for u in 0..n {
                        if alpha[(v, u)] == 0.0 {
                            continue;
                        }
                        let whu: f64 = (0..h.ncols()).map(|c| h[(u, c)] * layer.w[(c, k)]).sum();
                        acc += alpha[(v, u)] * whu;
                    }
                    next[(v, k)] = acc;
                }
            }
            h = model.nonlinearity.apply(&next);
        }
        h
    }

    #[test]
    fn five_node_forward_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 5;
        let mut adj = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random_range(0.0..1.0) < 0.5 {
                    adj[(i, j)] = 1.0;
                    adj[(j, i)] = 1.0;
                }
            }
        }
        let adj = attention_adjacency(&adj, true);
        let x = Array2::from_shape_fn((n, 3), |_| rng.random_range(-1.0..1.0));
        let cfg = GaeConfig {
            layers: 2,
            hidden_dim: 4,
            embedding_dim: 2,
            ..GaeConfig::default()
        };
        let model = GaeModel::init(&cfg, 3, &mut rng);
        let z = gat_forward(&model, &x, &adj).unwrap().pop().unwrap();
        let want = forward_oracle(&model, &x, &adj);
        for (a, b) in z.iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn decoder_zero_embeddings_give_half() {
        let z = Array2::zeros((3, 4));
        let a_hat = decode_adjacency(&z);
        assert!(a_hat.iter().all(|&v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn decoder_orthogonal_unit_rows() {
        let z = array![[1.0, 0.0], [0.0, 1.0]];
        let a_hat = decode_adjacency(&z);
        let sig1 = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((a_hat[(0, 0)] - sig1).abs() < 1e-9);
        assert!((sig1 - 0.7311).abs() < 1e-4);
        assert!((a_hat[(0, 1)] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn decoder_symmetric_in_unit_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let z = Array2::from_shape_fn((6, 3), |_| rng.random_range(-2.0..2.0));
        let a_hat = decode_adjacency(&z);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(a_hat[(i, j)], a_hat[(j, i)]);
                assert!(a_hat[(i, j)] > 0.0 && a_hat[(i, j)] < 1.0);
            }
        }
    }
}
