//! Attribute extraction for one account within a graph.

use crate::error::{Error, Result};
use crate::features::registry::FEATURE_COUNT;
use crate::txdata::{TransactionRecord, TxGraph};

const SECS_PER_DAY: i64 = 86_400;

/// The 43-dimensional hand-crafted feature vector of one account, aligned to
/// the registry order.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeVector {
    pub address: String,
    pub values: Vec<f64>,
}

impl AttributeVector {
    fn new(address: &str, values: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(values.len(), FEATURE_COUNT);
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("attribute extraction"));
        }
        Ok(Self {
            address: address.to_string(),
            values,
        })
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Population standard deviation; 0 for fewer than two values.
fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn min(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min).min(f64::INFINITY)
}

fn max(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min_or_zero(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        min(xs)
    }
}

fn max_or_zero(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        max(xs)
    }
}

fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Consecutive differences of an ascending timestamp sequence.
fn intervals(ts: &[i64]) -> Vec<f64> {
    ts.windows(2).map(|w| (w[1] - w[0]) as f64).collect()
}

/// Extract the 43 registry features for `account` from its graph.
///
/// The account must have at least one transaction in the graph. Extraction
/// sorts internally, so the result does not depend on input transaction
/// order.
pub fn extract_attributes(graph: &TxGraph, account: &str) -> Result<AttributeVector> {
    let node = graph
        .node_index(account)
        .ok_or_else(|| Error::UnknownAddress(account.to_string()))?;
    let history: &[TransactionRecord] = graph.history_by_index(node);
    if history.is_empty() {
        return Err(Error::EmptyHistory(account.to_string()));
    }

    let mut txs: Vec<&TransactionRecord> = history.iter().collect();
    txs.sort_by(|a, b| (a.timestamp, &a.tx_id).cmp(&(b.timestamp, &b.tx_id)));

    let all_ts: Vec<i64> = txs.iter().map(|t| t.timestamp).collect();
    let incoming: Vec<&TransactionRecord> =
        txs.iter().filter(|t| t.receiver == account).copied().collect();
    let outgoing: Vec<&TransactionRecord> =
        txs.iter().filter(|t| t.sender == account).copied().collect();
    let in_ts: Vec<i64> = incoming.iter().map(|t| t.timestamp).collect();
    let out_ts: Vec<i64> = outgoing.iter().map(|t| t.timestamp).collect();
    let in_amounts: Vec<f64> = incoming.iter().map(|t| t.amount as f64).collect();
    let out_amounts: Vec<f64> = outgoing.iter().map(|t| t.amount as f64).collect();
    let all_amounts: Vec<f64> = txs.iter().map(|t| t.amount as f64).collect();

    let n = txs.len() as f64;
    let first_ts = all_ts[0];
    let last_ts = *all_ts.last().unwrap();

    // per-day activity
    let days: Vec<i64> = all_ts.iter().map(|t| t.div_euclid(SECS_PER_DAY)).collect();
    let first_day = days[0];
    let mut day_counts: Vec<(i64, usize)> = Vec::new();
    for d in &days {
        match day_counts.last_mut() {
            Some((day, c)) if day == d => *c += 1,
            _ => day_counts.push((*d, 1)),
        }
    }
    let active_days = day_counts.len() as f64;
    let lifecycle_days = (days.last().unwrap() - first_day + 1) as f64;
    let (peak_day, max_per_day) = day_counts
        .iter()
        .fold((first_day, 0usize), |(bd, bc), &(d, c)| {
            if c > bc {
                (d, c)
            } else {
                (bd, bc)
            }
        });

    let gaps = intervals(&all_ts);
    let in_gaps = intervals(&in_ts);
    let out_gaps = intervals(&out_ts);
    let hours: Vec<f64> = all_ts
        .iter()
        .map(|t| t.rem_euclid(SECS_PER_DAY) as f64 / 3600.0)
        .collect();

    let gap_mean = mean(&gaps);
    let gap_std = std_dev(&gaps);
    let burstiness = if gap_std + gap_mean > 0.0 {
        (gap_std - gap_mean) / (gap_std + gap_mean)
    } else {
        0.0
    };

    let total_in: f64 = in_amounts.iter().sum();
    let total_out: f64 = out_amounts.iter().sum();
    let total_volume: f64 = all_amounts.iter().sum();
    let median_all = median(&all_amounts);

    let unique_in = {
        let mut s: Vec<&str> = incoming.iter().map(|t| t.sender.as_str()).collect();
        s.sort_unstable();
        s.dedup();
        s.len() as f64
    };
    let unique_out = {
        let mut s: Vec<&str> = outgoing.iter().map(|t| t.receiver.as_str()).collect();
        s.sort_unstable();
        s.dedup();
        s.len() as f64
    };

    let neighbors = graph.neighbors(node);
    let neighbor_mean_tx = if neighbors.is_empty() {
        0.0
    } else {
        neighbors
            .iter()
            .map(|&j| graph.history_by_index(j).len() as f64)
            .sum::<f64>()
            / neighbors.len() as f64
    };

    let values = vec![
        // temporal
        (last_ts - first_ts) as f64,
        active_days,
        active_days / lifecycle_days,
        gap_mean,
        gap_std,
        min_or_zero(&gaps),
        max_or_zero(&gaps),
        mean(&in_gaps),
        std_dev(&in_gaps),
        mean(&out_gaps),
        std_dev(&out_gaps),
        mean(&hours),
        std_dev(&hours),
        max_per_day as f64,
        n / active_days,
        ((peak_day - first_day) * SECS_PER_DAY) as f64,
        burstiness,
        // amount
        total_in,
        total_out,
        total_out - total_in,
        mean(&in_amounts),
        std_dev(&in_amounts),
        min_or_zero(&in_amounts),
        max_or_zero(&in_amounts),
        mean(&out_amounts),
        std_dev(&out_amounts),
        min_or_zero(&out_amounts),
        max_or_zero(&out_amounts),
        max_or_zero(&in_amounts) - min_or_zero(&in_amounts),
        max_or_zero(&out_amounts) - min_or_zero(&out_amounts),
        median(&in_amounts),
        median(&out_amounts),
        if total_in > 0.0 { total_out / total_in } else { 0.0 },
        if total_volume > 0.0 {
            max_or_zero(&all_amounts) / total_volume
        } else {
            0.0
        },
        total_volume / n,
        all_amounts.iter().filter(|&&a| a < median_all).count() as f64 / n,
        // count
        incoming.len() as f64,
        outgoing.len() as f64,
        outgoing.len() as f64 - incoming.len() as f64,
        unique_in,
        unique_out,
        n,
        neighbor_mean_tx,
    ];

    AttributeVector::new(account, values)
}
