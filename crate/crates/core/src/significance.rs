//! Empirical p-value of a partition against a group of null datasets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::randomize::RandomizedGroup;
use crate::search::SearchConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    /// Fraction of null datasets whose locally optimal SRS is `<=` the observed SRS.
    pub p_value: f64,
    /// `(r + 1) / (|R| + 1)`; never zero. Reported for information only.
    pub p_value_plus_one: f64,
    pub observed: f64,
    pub null_srs: Vec<f64>,
}

/// Plain proportion `|{null <= observed}| / |R|`.
pub fn pvalue_from_null(observed: f64, null_srs: &[f64]) -> Result<PValue> {
    if null_srs.is_empty() {
        return Err(Error::InvalidArgument("empty null sample".to_owned()));
    }
    let r = null_srs.iter().filter(|&&s| s <= observed).count() as f64;
    let size = null_srs.len() as f64;
    Ok(PValue {
        p_value: r / size,
        p_value_plus_one: (r + 1.0) / (size + 1.0),
        observed,
        null_srs: null_srs.to_vec(),
    })
}

/// Runs the search with `config` (its `k`, objective and failure budget) on
/// every null dataset and compares against `partition_srs`.
pub fn empirical_pvalue(partition_srs: f64, group: &RandomizedGroup, config: &SearchConfig) -> Result<PValue> {
    if group.is_empty() {
        return Err(Error::InvalidArgument("randomized group is empty".to_owned()));
    }
    let null = group.null_values(config)?;
    pvalue_from_null(partition_srs, &null)
}
