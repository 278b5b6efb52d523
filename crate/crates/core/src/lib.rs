//! Account-interaction representations for cryptocurrency transaction
//! forensics: hand-crafted attributes fused with graph-attention
//! autoencoder embeddings, behavior-preserving augmentation, contrastive
//! pre-training, few-label fine-tuning, and evaluation protocols for
//! zero-shot, cross-platform, imbalanced, and few-shot detection.

pub mod augment;
pub mod checkpoint;
pub mod classify;
pub mod contrastive;
pub mod error;
pub mod features;
pub mod gae;
pub mod harness;
pub mod nn;
pub mod rng;
pub mod synthgen;
pub mod txdata;

pub use error::{Error, Result};
