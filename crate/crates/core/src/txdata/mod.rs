//! Transaction data model: records, labels, datasets, and account graphs.

mod graph;
mod io;
mod types;

pub use graph::{adjacency, build_ego_graph, merge_graphs, EgoGraph, TxGraph};
pub use io::{
    load_labels, load_transactions, write_labels, write_transactions, LoadMode, LoadSummary,
};
pub use types::{BehaviorLabel, BinaryLabel, Dataset, TransactionRecord};
