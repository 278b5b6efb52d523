//! Graph autoencoder with a graph-attention encoder: structural embeddings
//! and their fusion with normalized attributes.

mod forward;
mod loss;
mod train;

pub use forward::{attention_coefficients, decode_adjacency, gat_forward};
pub use loss::gae_loss;
pub use train::{gae_step_grads, gae_step_loss, train_gae, GaeTraining, LossCurve};

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FEATURE_COUNT;
use crate::nn::{xavier, OptimizerKind};

/// Nonlinearity applied after each attention layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonlinearity {
    Elu,
    Relu,
    Identity,
}

impl Nonlinearity {
    pub(crate) fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        match self {
            Nonlinearity::Elu => x.mapv(|v| if v > 0.0 { v } else { v.exp() - 1.0 }),
            Nonlinearity::Relu => x.mapv(|v| v.max(0.0)),
            Nonlinearity::Identity => x.clone(),
        }
    }
}

/// One attention layer: a linear transform plus the attention map over a
/// concatenated node pair, stored as its two halves.
#[derive(Debug, Clone)]
pub struct GatLayerParams {
    /// in_dim x out_dim.
    pub w: Array2<f64>,
    /// out_dim x 1; applies to the source half of the concatenated pair.
    pub a_left: Array2<f64>,
    /// out_dim x 1; applies to the neighbor half.
    pub a_right: Array2<f64>,
    pub leaky_slope: f64,
}

impl GatLayerParams {
    pub fn init<R: Rng>(in_dim: usize, out_dim: usize, leaky_slope: f64, rng: &mut R) -> Self {
        Self {
            w: xavier(in_dim, out_dim, rng),
            a_left: xavier(out_dim, 1, rng),
            a_right: xavier(out_dim, 1, rng),
            leaky_slope,
        }
    }

    pub fn out_dim(&self) -> usize {
        self.w.ncols()
    }
}

/// Training configuration for the autoencoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaeConfig {
    /// Number of attention layers (k).
    pub layers: usize,
    pub hidden_dim: usize,
    pub embedding_dim: usize,
    /// Weight of the adjacency reconstruction term; 0 keeps the literal
    /// feature-only loss.
    pub lambda: f64,
    pub leaky_slope: f64,
    pub nonlinearity: Nonlinearity,
    /// Add self-loops before attention so nodes can retain self-information.
    pub self_loops: bool,
    /// Per-epoch random feature-mask rate; masked entries are zeroed at the
    /// input and reconstructed at the output.
    pub mask_rate: f64,
    pub epochs: usize,
    pub step_size: f64,
    pub optimizer: OptimizerKind,
    /// Train one autoencoder per ego graph instead of one per dataset.
    pub per_ego: bool,
}

impl Default for GaeConfig {
    fn default() -> Self {
        Self {
            layers: 2,
            hidden_dim: 64,
            embedding_dim: 32,
            lambda: 1.0,
            leaky_slope: 0.2,
            nonlinearity: Nonlinearity::Elu,
            self_loops: true,
            mask_rate: 0.15,
            epochs: 200,
            step_size: 0.01,
            optimizer: OptimizerKind::Adam,
            per_ego: false,
        }
    }
}

impl GaeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers < 1 {
            return Err(Error::InvalidConfig("gae.layers must be >= 1".into()));
        }
        if self.embedding_dim < 1 {
            return Err(Error::InvalidConfig("gae.embedding_dim must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.leaky_slope) || self.leaky_slope == 0.0 {
            return Err(Error::InvalidConfig(
                "gae.leaky_slope must be in (0, 1)".into(),
            ));
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidConfig("gae.lambda must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.mask_rate) {
            return Err(Error::InvalidConfig("gae.mask_rate must be in [0, 1]".into()));
        }
        Ok(())
    }

    /// Layer output dimensions: hidden for all but the last, embedding last.
    pub fn layer_dims(&self, input_dim: usize) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.layers);
        let mut prev = input_dim;
        for i in 0..self.layers {
            let out = if i + 1 == self.layers {
                self.embedding_dim
            } else {
                self.hidden_dim
            };
            dims.push((prev, out));
            prev = out;
        }
        dims
    }
}

/// The autoencoder: attention layers, a linear feature decoder, and the loss
/// weight for adjacency reconstruction.
#[derive(Debug, Clone)]
pub struct GaeModel {
    pub layers: Vec<GatLayerParams>,
    /// embedding_dim x feature_dim readout reconstructing node features.
    pub decoder_w: Array2<f64>,
    /// 1 x feature_dim.
    pub decoder_b: Array2<f64>,
    pub lambda: f64,
    pub nonlinearity: Nonlinearity,
    pub self_loops: bool,
}

impl GaeModel {
    pub fn init<R: Rng>(cfg: &GaeConfig, input_dim: usize, rng: &mut R) -> Self {
        let layers = cfg
            .layer_dims(input_dim)
            .into_iter()
            .map(|(i, o)| GatLayerParams::init(i, o, cfg.leaky_slope, rng))
            .collect();
        Self {
            layers,
            decoder_w: xavier(cfg.embedding_dim, input_dim, rng),
            decoder_b: crate::nn::zeros_vec(input_dim),
            lambda: cfg.lambda,
            nonlinearity: cfg.nonlinearity,
            self_loops: cfg.self_loops,
        }
    }

    pub fn embedding_dim(&self) -> usize {
        self.layers.last().expect("k >= 1").out_dim()
    }

    /// Parameters in a fixed order (layer w/a_left/a_right, then decoder).
    pub fn params(&self) -> Vec<&Array2<f64>> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.push(&l.w);
            out.push(&l.a_left);
            out.push(&l.a_right);
        }
        out.push(&self.decoder_w);
        out.push(&self.decoder_b);
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Array2<f64>> {
        let mut out = Vec::new();
        for l in &mut self.layers {
            out.push(&mut l.w);
            out.push(&mut l.a_left);
            out.push(&mut l.a_right);
        }
        out.push(&mut self.decoder_w);
        out.push(&mut self.decoder_b);
        out
    }

    /// All parameter values flattened in params() order.
    pub fn flatten(&self) -> Vec<f64> {
        self.params()
            .iter()
            .flat_map(|p| p.iter().copied())
            .collect()
    }

    pub fn assign_flat(&mut self, flat: &[f64]) {
        let mut k = 0;
        for p in self.params_mut() {
            for v in p.iter_mut() {
                *v = flat[k];
                k += 1;
            }
        }
        assert_eq!(k, flat.len());
    }
}

/// Attribute/structure fusion: `[x_norm || z]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedRepresentation {
    pub address: String,
    /// length 43 + embedding_dim; the first 43 entries are the normalized
    /// attributes.
    pub values: Vec<f64>,
}

impl FusedRepresentation {
    pub fn attributes(&self) -> &[f64] {
        &self.values[..FEATURE_COUNT]
    }

    pub fn embedding(&self) -> &[f64] {
        &self.values[FEATURE_COUNT..]
    }
}

/// Concatenate normalized attributes with a structural embedding row.
pub fn fuse(address: &str, x_norm: &[f64], z_row: &[f64]) -> Result<FusedRepresentation> {
    if x_norm.len() != FEATURE_COUNT {
        return Err(Error::DimMismatch {
            expected: FEATURE_COUNT,
            got: x_norm.len(),
        });
    }
    let mut values = Vec::with_capacity(x_norm.len() + z_row.len());
    values.extend_from_slice(x_norm);
    values.extend_from_slice(z_row);
    Ok(FusedRepresentation {
        address: address.to_string(),
        values,
    })
}

/// Binary adjacency with self-loops added (attention neighborhoods).
pub(crate) fn attention_adjacency(a: &Array2<f64>, self_loops: bool) -> Array2<f64> {
    let mut m = a.mapv(|v| if v != 0.0 { 1.0 } else { 0.0 });
    if self_loops {
        for i in 0..m.nrows() {
            m[(i, i)] = 1.0;
        }
    }
    m
}
