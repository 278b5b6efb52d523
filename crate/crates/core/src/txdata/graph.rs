//! Account graphs: k-hop ego graphs around target accounts and unions of
//! ego graphs for whole-dataset training.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::txdata::types::{Dataset, TransactionRecord};

/// An immutable account-interaction graph.
///
/// Nodes are ordered (the order defines matrix row/column indices), edges are
/// directed with transaction-count multiplicity, and each node carries its
/// time-sorted transaction history restricted to the subgraph.
#[derive(Debug, Clone)]
pub struct TxGraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    /// (from, to) -> transaction count.
    edges: BTreeMap<(usize, usize), u32>,
    /// Parallel to `nodes`.
    histories: Vec<Vec<TransactionRecord>>,
}

impl TxGraph {
    fn from_parts(nodes: Vec<String>, transactions: Vec<TransactionRecord>) -> Self {
        let index: HashMap<String, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let mut edges: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        let mut histories: Vec<Vec<TransactionRecord>> = vec![Vec::new(); nodes.len()];
        for tx in transactions {
            let (Some(&s), Some(&r)) = (index.get(&tx.sender), index.get(&tx.receiver)) else {
                continue;
            };
            *edges.entry((s, r)).or_insert(0) += 1;
            histories[s].push(tx.clone());
            if r != s {
                histories[r].push(tx);
            }
        }
        for h in &mut histories {
            h.sort_by_key(|t| t.timestamp);
        }
        Self {
            nodes,
            index,
            edges,
            histories,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, addr: &str) -> Option<usize> {
        self.index.get(addr).copied()
    }

    /// Directed edges with multiplicity.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.edges.iter().map(|(&(s, r), &m)| (s, r, m))
    }

    /// Time-sorted history of `addr` within the subgraph.
    pub fn history(&self, addr: &str) -> Option<&[TransactionRecord]> {
        self.index.get(addr).map(|&i| self.histories[i].as_slice())
    }

    pub fn history_by_index(&self, i: usize) -> &[TransactionRecord] {
        &self.histories[i]
    }

    /// Undirected 1-hop neighbor indices of node `i`, ascending, excluding `i`.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out = BTreeSet::new();
        for (&(s, r), _) in &self.edges {
            if s == i && r != i {
                out.insert(r);
            }
            if r == i && s != i {
                out.insert(s);
            }
        }
        out.into_iter().collect()
    }

    /// Copy of this graph with one node's history replaced.
    ///
    /// Edges and all other histories are untouched; used for augmented views
    /// where only the center's transaction list changes.
    pub fn with_history(&self, addr: &str, history: Vec<TransactionRecord>) -> Result<TxGraph> {
        let i = self
            .node_index(addr)
            .ok_or_else(|| Error::UnknownAddress(addr.to_string()))?;
        let mut g = self.clone();
        g.histories[i] = history;
        g.histories[i].sort_by_key(|t| t.timestamp);
        Ok(g)
    }
}

/// The k-hop neighborhood of a center account.
#[derive(Debug, Clone)]
pub struct EgoGraph {
    pub center: String,
    pub hop_limit: u32,
    pub graph: TxGraph,
}

impl EgoGraph {
    pub fn center_history(&self) -> &[TransactionRecord] {
        self.graph
            .history(&self.center)
            .expect("center is always a node")
    }
}

/// Build the ego graph of `center`: all addresses reachable within `hops`
/// undirected steps, edges with multiplicity, histories restricted to the
/// subgraph. Node order is center first, then ascending address order.
pub fn build_ego_graph(dataset: &Dataset, center: &str, hops: u32) -> Result<EgoGraph> {
    if !dataset.contains_address(center) {
        return Err(Error::UnknownAddress(center.to_string()));
    }
    assert!(hops >= 1, "hop limit must be at least 1");

    let mut reached: HashSet<String> = HashSet::new();
    reached.insert(center.to_string());
    let mut frontier: VecDeque<(String, u32)> = VecDeque::new();
    frontier.push_back((center.to_string(), 0));
    while let Some((addr, depth)) = frontier.pop_front() {
        if depth == hops {
            continue;
        }
        for &ti in dataset.transactions_of(&addr) {
            let tx = &dataset.transactions()[ti];
            for next in [&tx.sender, &tx.receiver] {
                if !reached.contains(next.as_str()) {
                    reached.insert(next.clone());
                    frontier.push_back((next.clone(), depth + 1));
                }
            }
        }
    }

    let mut rest: Vec<String> = reached.iter().filter(|a| *a != center).cloned().collect();
    rest.sort();
    let mut nodes = Vec::with_capacity(rest.len() + 1);
    nodes.push(center.to_string());
    nodes.extend(rest);

    let mut tx_indices: BTreeSet<usize> = BTreeSet::new();
    for addr in &reached {
        for &ti in dataset.transactions_of(addr) {
            let tx = &dataset.transactions()[ti];
            if reached.contains(&tx.sender) && reached.contains(&tx.receiver) {
                tx_indices.insert(ti);
            }
        }
    }
    let transactions: Vec<TransactionRecord> = tx_indices
        .into_iter()
        .map(|i| dataset.transactions()[i].clone())
        .collect();

    Ok(EgoGraph {
        center: center.to_string(),
        hop_limit: hops,
        graph: TxGraph::from_parts(nodes, transactions),
    })
}

/// Merge ego graphs into one graph over the union of their nodes.
///
/// Node order is ascending address order; duplicate transactions (the same
/// tx appearing in several ego graphs) are deduplicated by tx_id.
pub fn merge_graphs(egos: &[EgoGraph]) -> TxGraph {
    let mut node_set: BTreeSet<&str> = BTreeSet::new();
    for ego in egos {
        for n in ego.graph.nodes() {
            node_set.insert(n);
        }
    }
    let nodes: Vec<String> = node_set.into_iter().map(str::to_string).collect();

    let mut seen: HashSet<&str> = HashSet::new();
    let mut transactions: Vec<TransactionRecord> = Vec::new();
    for ego in egos {
        for i in 0..ego.graph.node_count() {
            for tx in ego.graph.history_by_index(i) {
                if seen.insert(&tx.tx_id) {
                    transactions.push(tx.clone());
                }
            }
        }
    }
    transactions.sort_by(|a, b| (a.timestamp, &a.tx_id).cmp(&(b.timestamp, &b.tx_id)));

    TxGraph::from_parts(nodes, transactions)
}

/// Adjacency matrix over the graph's node order.
///
/// Binary mode: symmetric 0/1 entries, 1 wherever any edge joins the pair.
/// Weighted mode: directed transaction counts. The diagonal is zero unless
/// self-transactions exist.
pub fn adjacency(graph: &TxGraph, binary: bool) -> Array2<f64> {
    let n = graph.node_count();
    let mut a = Array2::zeros((n, n));
    for (s, r, m) in graph.edges() {
        if binary {
            a[(s, r)] = 1.0;
            a[(r, s)] = 1.0;
        } else {
            a[(s, r)] += f64::from(m);
        }
    }
    a
}
