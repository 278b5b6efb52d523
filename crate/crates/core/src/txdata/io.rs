//! On-disk wire formats.
//!
//! Transactions are line-delimited JSON objects with exactly the fields
//! `tx_id`, `timestamp`, `sender`, `receiver`, `amount`. Labels are CSV with
//! the header `address,label`.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::txdata::types::{BehaviorLabel, TransactionRecord};

/// Whether malformed lines abort the load or are skipped and counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMode {
    Strict,
    Lenient,
}

/// Outcome of a lenient load.
#[derive(Debug, Clone, Default)]
pub struct LoadSummary {
    pub loaded: usize,
    pub skipped: usize,
    /// (line number, reason) for every skipped line.
    pub errors: Vec<(usize, String)>,
}

/// Raw record with signed fields so range errors report precisely.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    tx_id: String,
    timestamp: i64,
    sender: String,
    receiver: String,
    amount: i64,
}

fn parse_line(line: &str, line_no: usize, seen: &mut HashSet<String>) -> Result<TransactionRecord> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| Error::ParseLine {
        line: line_no,
        reason: e.to_string(),
    })?;
    if raw.amount < 0 {
        return Err(Error::ParseLine {
            line: line_no,
            reason: format!("negative amount {}", raw.amount),
        });
    }
    let record = TransactionRecord {
        tx_id: raw.tx_id,
        timestamp: raw.timestamp,
        sender: raw.sender,
        receiver: raw.receiver,
        amount: raw.amount as u64,
    };
    record.validate().map_err(|reason| Error::ParseLine {
        line: line_no,
        reason,
    })?;
    if !seen.insert(record.tx_id.clone()) {
        return Err(Error::ParseLine {
            line: line_no,
            reason: format!("duplicate tx_id '{}'", record.tx_id),
        });
    }
    Ok(record)
}

/// Load transactions from a line-delimited file.
///
/// In strict mode the first malformed line aborts; in lenient mode malformed
/// lines are skipped and counted in the summary. Records come back in file
/// order.
pub fn load_transactions(
    path: impl AsRef<Path>,
    mode: LoadMode,
) -> Result<(Vec<TransactionRecord>, LoadSummary)> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    let mut summary = LoadSummary::default();
    let mut seen = HashSet::new();
    for (idx, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(line, idx + 1, &mut seen) {
            Ok(r) => {
                records.push(r);
                summary.loaded += 1;
            }
            Err(e) => match mode {
                LoadMode::Strict => return Err(e),
                LoadMode::Lenient => {
                    summary.skipped += 1;
                    summary.errors.push((idx + 1, e.to_string()));
                }
            },
        }
    }
    Ok((records, summary))
}

/// Write transactions in the wire format, one JSON object per line.
pub fn write_transactions(path: impl AsRef<Path>, records: &[TransactionRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("record serialization cannot fail");
        out.push(b'\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Load the `address,label` CSV. Duplicate rows with the same label are
/// tolerated; conflicting duplicates are an error naming the address.
pub fn load_labels(path: impl AsRef<Path>) -> Result<BTreeMap<String, BehaviorLabel>> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "address,label" => {}
        Some((_, header)) => {
            return Err(Error::ParseLine {
                line: 1,
                reason: format!("expected header 'address,label', got '{}'", header.trim()),
            })
        }
        None => return Ok(BTreeMap::new()),
    }
    let mut map = BTreeMap::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (addr, label_str) = line.split_once(',').ok_or_else(|| Error::ParseLine {
            line: idx + 1,
            reason: "expected 'address,label'".into(),
        })?;
        let label = BehaviorLabel::parse(label_str.trim())?;
        let addr = addr.trim().to_string();
        if let Some(prev) = map.insert(addr.clone(), label) {
            if prev != label {
                return Err(Error::ConflictingLabel {
                    address: addr,
                    first: prev.as_str().into(),
                    second: label.as_str().into(),
                });
            }
        }
    }
    Ok(map)
}

/// Write the label CSV with its header.
pub fn write_labels(
    path: impl AsRef<Path>,
    labels: &BTreeMap<String, BehaviorLabel>,
) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    writeln!(buf, "address,label").expect("in-memory write");
    for (addr, label) in labels {
        writeln!(buf, "{},{}", addr, label.as_str()).expect("in-memory write");
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}
