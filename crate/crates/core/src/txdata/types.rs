//! Core domain types: transactions, behavior labels, datasets.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One directed value transfer.
///
/// Amounts are integers in base currency units (satoshi-scale); they are
/// converted to reals only inside feature computation so storage never
/// accumulates float drift. Timestamps are seconds since epoch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransactionRecord {
    pub tx_id: String,
    pub timestamp: i64,
    pub sender: String,
    pub receiver: String,
    pub amount: u64,
}

impl TransactionRecord {
    pub fn new(
        tx_id: impl Into<String>,
        timestamp: i64,
        sender: impl Into<String>,
        receiver: impl Into<String>,
        amount: u64,
    ) -> Self {
        Self {
            tx_id: tx_id.into(),
            timestamp,
            sender: sender.into(),
            receiver: receiver.into(),
            amount,
        }
    }

    /// True when the record satisfies the storage invariants.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.timestamp < 0 {
            return Err(format!("negative timestamp {}", self.timestamp));
        }
        if self.sender.is_empty() {
            return Err("empty sender".into());
        }
        if self.receiver.is_empty() {
            return Err("empty receiver".into());
        }
        if self.tx_id.is_empty() {
            return Err("empty tx_id".into());
        }
        Ok(())
    }
}

/// Behavior class of an account.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum BehaviorLabel {
    PersonalWallet,
    MiningPool,
    NetworkService,
    DigitalFinancialService,
    Phishing,
    Gambling,
    PonziScheme,
    MoneyLaundering,
    CriminalBlacklist,
    DarknetTransaction,
}

/// Binary roll-up of [`BehaviorLabel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BinaryLabel {
    Normal,
    Malicious,
}

impl BehaviorLabel {
    pub const ALL: [BehaviorLabel; 10] = [
        BehaviorLabel::PersonalWallet,
        BehaviorLabel::MiningPool,
        BehaviorLabel::NetworkService,
        BehaviorLabel::DigitalFinancialService,
        BehaviorLabel::Phishing,
        BehaviorLabel::Gambling,
        BehaviorLabel::PonziScheme,
        BehaviorLabel::MoneyLaundering,
        BehaviorLabel::CriminalBlacklist,
        BehaviorLabel::DarknetTransaction,
    ];

    pub const MALICIOUS: [BehaviorLabel; 6] = [
        BehaviorLabel::Phishing,
        BehaviorLabel::Gambling,
        BehaviorLabel::PonziScheme,
        BehaviorLabel::MoneyLaundering,
        BehaviorLabel::CriminalBlacklist,
        BehaviorLabel::DarknetTransaction,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BehaviorLabel::PersonalWallet => "PersonalWallet",
            BehaviorLabel::MiningPool => "MiningPool",
            BehaviorLabel::NetworkService => "NetworkService",
            BehaviorLabel::DigitalFinancialService => "DigitalFinancialService",
            BehaviorLabel::Phishing => "Phishing",
            BehaviorLabel::Gambling => "Gambling",
            BehaviorLabel::PonziScheme => "PonziScheme",
            BehaviorLabel::MoneyLaundering => "MoneyLaundering",
            BehaviorLabel::CriminalBlacklist => "CriminalBlacklist",
            BehaviorLabel::DarknetTransaction => "DarknetTransaction",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        BehaviorLabel::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }

    /// Six malicious classes roll up to `Malicious`, the four service roles
    /// to `Normal`.
    pub fn binary(&self) -> BinaryLabel {
        if BehaviorLabel::MALICIOUS.contains(self) {
            BinaryLabel::Malicious
        } else {
            BinaryLabel::Normal
        }
    }

    /// Stable index into [`BehaviorLabel::ALL`].
    pub fn index(&self) -> usize {
        BehaviorLabel::ALL.iter().position(|l| l == self).unwrap()
    }
}

impl std::fmt::Display for BehaviorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl BinaryLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BinaryLabel::Normal => "Normal",
            BinaryLabel::Malicious => "Malicious",
        }
    }
}

impl std::fmt::Display for BinaryLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An immutable transaction dataset with account labels.
///
/// Construction validates that every labeled address appears in at least one
/// transaction; afterwards the dataset is read-only and safe to share across
/// threads.
#[derive(Debug, Clone)]
pub struct Dataset {
    transactions: Vec<TransactionRecord>,
    labels: BTreeMap<String, BehaviorLabel>,
    platform: String,
    /// address -> indices into `transactions`, in file order.
    by_address: HashMap<String, Vec<usize>>,
}

impl Dataset {
    pub fn new(
        transactions: Vec<TransactionRecord>,
        labels: BTreeMap<String, BehaviorLabel>,
        platform: impl Into<String>,
    ) -> Result<Self> {
        let mut by_address: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, tx) in transactions.iter().enumerate() {
            by_address.entry(tx.sender.clone()).or_default().push(i);
            if tx.receiver != tx.sender {
                by_address.entry(tx.receiver.clone()).or_default().push(i);
            }
        }
        for addr in labels.keys() {
            if !by_address.contains_key(addr) {
                return Err(Error::UnlabeledOrphan(addr.clone()));
            }
        }
        Ok(Self {
            transactions,
            labels,
            platform: platform.into(),
            by_address,
        })
    }

    pub fn transactions(&self) -> &[TransactionRecord] {
        &self.transactions
    }

    pub fn labels(&self) -> &BTreeMap<String, BehaviorLabel> {
        &self.labels
    }

    pub fn platform(&self) -> &str {
        &self.platform
    }

    pub fn contains_address(&self, addr: &str) -> bool {
        self.by_address.contains_key(addr)
    }

    /// Indices of transactions touching `addr`, in file order.
    pub fn transactions_of(&self, addr: &str) -> &[usize] {
        self.by_address.get(addr).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Labeled addresses in ascending address order.
    pub fn labeled_addresses(&self) -> impl Iterator<Item = (&String, BehaviorLabel)> {
        self.labels.iter().map(|(a, l)| (a, *l))
    }

    /// Per-class address counts.
    pub fn class_counts(&self) -> BTreeMap<BehaviorLabel, usize> {
        let mut counts = BTreeMap::new();
        for label in self.labels.values() {
            *counts.entry(*label).or_insert(0) += 1;
        }
        counts
    }
}
