//! The versioned feature registry: 17 temporal, 19 amount, 7 count features
//! in a fixed order. Column names in persisted feature tables are exactly
//! these names.

/// Total number of registered features.
pub const FEATURE_COUNT: usize = 43;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Temporal,
    Amount,
    Count,
}

#[derive(Debug, Clone, Copy)]
pub struct FeatureDef {
    pub name: &'static str,
    pub category: Category,
    pub unit: &'static str,
    pub description: &'static str,
}

const fn f(
    name: &'static str,
    category: Category,
    unit: &'static str,
    description: &'static str,
) -> FeatureDef {
    FeatureDef {
        name,
        category,
        unit,
        description,
    }
}

use Category::{Amount, Count, Temporal};

static REGISTRY: [FeatureDef; FEATURE_COUNT] = [
    // temporal, f1-f17
    f("t01_lifecycle_span", Temporal, "s", "last minus first transaction timestamp"),
    f("t02_active_days", Temporal, "days", "number of distinct UTC days with at least one transaction"),
    f("t03_active_day_ratio", Temporal, "ratio", "active days over lifecycle days (inclusive)"),
    f("t04_interval_mean", Temporal, "s", "mean inter-transaction interval"),
    f("t05_interval_std", Temporal, "s", "std of inter-transaction intervals"),
    f("t06_interval_min", Temporal, "s", "minimum inter-transaction interval"),
    f("t07_interval_max", Temporal, "s", "maximum inter-transaction interval"),
    f("t08_in_arrival_mean", Temporal, "s", "mean inter-arrival of incoming transactions"),
    f("t09_in_arrival_std", Temporal, "s", "std of inter-arrival of incoming transactions"),
    f("t10_out_arrival_mean", Temporal, "s", "mean inter-arrival of outgoing transactions"),
    f("t11_out_arrival_std", Temporal, "s", "std of inter-arrival of outgoing transactions"),
    f("t12_hour_mean", Temporal, "h", "mean UTC hour of day"),
    f("t13_hour_std", Temporal, "h", "std of UTC hour of day"),
    f("t14_max_txs_per_day", Temporal, "count", "maximum transactions in any single UTC day"),
    f("t15_mean_txs_per_active_day", Temporal, "count", "transaction count over active days"),
    f("t16_gap_to_peak_day", Temporal, "s", "first transaction day to peak-activity day"),
    f("t17_interval_burstiness", Temporal, "ratio", "(std-mean)/(std+mean) of inter-transaction intervals"),
    // amount, f18-f36
    f("a01_total_in", Amount, "base", "total incoming amount"),
    f("a02_total_out", Amount, "base", "total outgoing amount"),
    f("a03_net_flow", Amount, "base", "total out minus total in"),
    f("a04_in_mean", Amount, "base", "mean incoming amount"),
    f("a05_in_std", Amount, "base", "std of incoming amounts"),
    f("a06_in_min", Amount, "base", "minimum incoming amount"),
    f("a07_in_max", Amount, "base", "maximum incoming amount"),
    f("a08_out_mean", Amount, "base", "mean outgoing amount"),
    f("a09_out_std", Amount, "base", "std of outgoing amounts"),
    f("a10_out_min", Amount, "base", "minimum outgoing amount"),
    f("a11_out_max", Amount, "base", "maximum outgoing amount"),
    f("a12_in_range", Amount, "base", "max minus min single incoming amount"),
    f("a13_out_range", Amount, "base", "max minus min single outgoing amount"),
    f("a14_in_median", Amount, "base", "median incoming amount"),
    f("a15_out_median", Amount, "base", "median outgoing amount"),
    f("a16_out_in_ratio", Amount, "ratio", "total out over total in"),
    f("a17_largest_over_total", Amount, "ratio", "largest single amount over total volume"),
    f("a18_mean_amount", Amount, "base", "total volume over transaction count"),
    f("a19_frac_below_median", Amount, "ratio", "fraction of transactions below the account median amount"),
    // count, f37-f43
    f("c01_in_degree", Count, "count", "incoming transaction count"),
    f("c02_out_degree", Count, "count", "outgoing transaction count"),
    f("c03_degree_diff", Count, "count", "outgoing minus incoming transaction count"),
    f("c04_unique_in_counterparties", Count, "count", "distinct incoming counterparties"),
    f("c05_unique_out_counterparties", Count, "count", "distinct outgoing counterparties"),
    f("c06_total_tx_count", Count, "count", "total transaction count"),
    f("c07_neighbor_mean_tx_count", Count, "count", "mean transaction count of 1-hop neighbors"),
];

/// The fixed, ordered feature registry.
pub fn registry() -> &'static [FeatureDef; FEATURE_COUNT] {
    &REGISTRY
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn partition_is_17_19_7() {
        let count = |c: Category| REGISTRY.iter().filter(|d| d.category == c).count();
        assert_eq!(count(Category::Temporal), 17);
        assert_eq!(count(Category::Amount), 19);
        assert_eq!(count(Category::Count), 7);
    }

    #[test]
    fn names_unique_and_categories_contiguous() {
        let names: HashSet<_> = REGISTRY.iter().map(|d| d.name).collect();
        assert_eq!(names.len(), FEATURE_COUNT);
        assert!(REGISTRY[..17].iter().all(|d| d.category == Category::Temporal));
        assert!(REGISTRY[17..36].iter().all(|d| d.category == Category::Amount));
        assert!(REGISTRY[36..].iter().all(|d| d.category == Category::Count));
    }
}
