//! Error types shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {reason}")]
    ParseLine { line: usize, reason: String },

    #[error("unknown label '{0}'")]
    UnknownLabel(String),

    #[error("conflicting labels for address '{address}': '{first}' vs '{second}'")]
    ConflictingLabel {
        address: String,
        first: String,
        second: String,
    },

    #[error("address '{0}' not present in dataset")]
    UnknownAddress(String),

    #[error("labeled address '{0}' has no transactions")]
    UnlabeledOrphan(String),

    #[error("account '{0}' has an empty transaction history")]
    EmptyHistory(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("node '{0}' has no neighbors (attention over an empty neighborhood)")]
    IsolatedNode(String),

    #[error("cosine similarity undefined for a zero vector")]
    ZeroVector,

    #[error("training diverged at epoch {epoch} in {stage}: loss = {loss}")]
    Divergence {
        stage: &'static str,
        epoch: usize,
        loss: f64,
    },

    #[error("label '{0}' is absent from the dataset")]
    LabelAbsent(String),

    #[error("requested ratio {malicious}:{normal} is infeasible ({available_malicious} malicious, {available_normal} normal available)")]
    InfeasibleRatio {
        malicious: usize,
        normal: usize,
        available_malicious: usize,
        available_normal: usize,
    },

    #[error("requested {requested} labeled samples but only {available} are available")]
    NotEnoughSamples { requested: usize, available: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("stage '{stage}' failed (config {config_hash}): {source}")]
    Stage {
        stage: &'static str,
        config_hash: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Machine-parsable error class, used by the CLI for one-line failures.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::ParseLine { .. } => "parse",
            Error::UnknownLabel(_) => "unknown-label",
            Error::ConflictingLabel { .. } => "conflicting-label",
            Error::UnknownAddress(_) => "unknown-address",
            Error::UnlabeledOrphan(_) => "unlabeled-orphan",
            Error::EmptyHistory(_) => "empty-history",
            Error::DimMismatch { .. } => "dim-mismatch",
            Error::NonFinite(_) => "non-finite",
            Error::IsolatedNode(_) => "isolated-node",
            Error::ZeroVector => "zero-vector",
            Error::Divergence { .. } => "divergence",
            Error::LabelAbsent(_) => "label-absent",
            Error::InfeasibleRatio { .. } => "infeasible-ratio",
            Error::NotEnoughSamples { .. } => "not-enough-samples",
            Error::InvalidConfig(_) => "invalid-config",
            Error::Stage { .. } => "stage-failure",
        }
    }
}
