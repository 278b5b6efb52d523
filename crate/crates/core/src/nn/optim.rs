//! Gradient-descent optimizers over flat parameter lists.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Optimizer selection; plain gradient steps are the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

pub enum Optimizer {
    Sgd {
        lr: f64,
    },
    Adam {
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
        t: u64,
        m: Vec<Array2<f64>>,
        v: Vec<Array2<f64>>,
    },
}

impl Optimizer {
    pub fn sgd(lr: f64) -> Self {
        Optimizer::Sgd { lr }
    }

    pub fn adam(lr: f64) -> Self {
        Optimizer::Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    pub fn new(kind: OptimizerKind, lr: f64) -> Self {
        match kind {
            OptimizerKind::Sgd => Self::sgd(lr),
            OptimizerKind::Adam => Self::adam(lr),
        }
    }

    /// Apply one update. `params` and `grads` must be index-aligned and keep
    /// the same order across steps (Adam state is positional).
    pub fn step(&mut self, params: &mut [&mut Array2<f64>], grads: &[Array2<f64>]) {
        assert_eq!(params.len(), grads.len());
        match self {
            Optimizer::Sgd { lr } => {
                for (p, g) in params.iter_mut().zip(grads) {
                    **p -= &g.mapv(|x| x * *lr);
                }
            }
            Optimizer::Adam {
                lr,
                beta1,
                beta2,
                eps,
                t,
                m,
                v,
            } => {
                if m.is_empty() {
                    for p in params.iter() {
                        m.push(Array2::zeros(p.dim()));
                        v.push(Array2::zeros(p.dim()));
                    }
                }
                *t += 1;
                let bc1 = 1.0 - beta1.powi(*t as i32);
                let bc2 = 1.0 - beta2.powi(*t as i32);
                for i in 0..params.len() {
                    m[i] = &m[i] * *beta1 + &grads[i].mapv(|x| x * (1.0 - *beta1));
                    v[i] = &v[i] * *beta2 + &grads[i].mapv(|x| x * x * (1.0 - *beta2));
                    let update = ndarray::Zip::from(&m[i])
                        .and(&v[i])
                        .map_collect(|&mi, &vi| *lr * (mi / bc1) / ((vi / bc2).sqrt() + *eps));
                    *params[i] -= &update;
                }
            }
        }
    }
}
