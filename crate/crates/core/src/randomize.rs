//! Count-preserving null datasets.
//!
//! Both generators rearrange values inside each attribute column, so `N`,
//! `M`, every `Q_m` and every per-attribute histogram are unchanged.
//! `swap` exchanges a pair of distinct values per attribute (a small
//! perturbation that can keep part of the cluster structure); `randperm`
//! shuffles each column independently (no structure left).

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Category, Dataset};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::search::{ksigcat_run, SearchConfig};

const REJECTION_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullMethod {
    Swap,
    Randperm,
}

impl fmt::Display for NullMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NullMethod::Swap => "swap",
            NullMethod::Randperm => "randperm",
        })
    }
}

impl FromStr for NullMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swap" => Ok(NullMethod::Swap),
            "randperm" => Ok(NullMethod::Randperm),
            other => Err(Error::InvalidArgument(format!("unknown null method {other:?}"))),
        }
    }
}

/// One swap of two distinct values in every attribute.
pub fn swap_dataset(dataset: &Dataset, seed: u64) -> Dataset {
    swap_dataset_n(dataset, 1, seed)
}

/// `swaps` independent swaps per attribute. Attributes with a single
/// distinct value are left as they are.
pub fn swap_dataset_n(dataset: &Dataset, swaps: usize, seed: u64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let n = dataset.n_objects();
    let m_count = dataset.n_attributes();
    let mut values = dataset.values().to_vec();
    for m in 0..m_count {
        let mut column: Vec<Category> = (0..n).map(|i| values[i * m_count + m]).collect();
        for _ in 0..swaps {
            match pick_distinct_pair(&column, dataset.categories_per_attribute()[m], &mut rng) {
                Some((a, b)) => column.swap(a, b),
                None => {
                    log::warn!("attribute {m} has a single distinct value; left unchanged");
                    break;
                }
            }
        }
        for (i, v) in column.into_iter().enumerate() {
            values[i * m_count + m] = v;
        }
    }
    dataset.with_values(values)
}

/// A uniformly random unordered pair of positions holding different values.
fn pick_distinct_pair<R: Rng>(column: &[Category], n_categories: usize, rng: &mut R) -> Option<(usize, usize)> {
    let n = column.len();
    if n < 2 {
        return None;
    }
    for _ in 0..REJECTION_ATTEMPTS {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if column[a] != column[b] {
            return Some((a.min(b), a.max(b)));
        }
    }
    // Exact fallback: weight each first position by how many partners it has.
    let mut counts = vec![0usize; n_categories];
    for &v in column {
        counts[v as usize] += 1;
    }
    let weights: Vec<usize> = column.iter().map(|&v| n - counts[v as usize]).collect();
    let total: usize = weights.iter().sum();
    if total == 0 {
        return None;
    }
    let mut target = rng.random_range(0..total);
    let a = weights
        .iter()
        .position(|&w| {
            if target < w {
                true
            } else {
                target -= w;
                false
            }
        })
        .expect("target below total weight");
    let partners: Vec<usize> = (0..n).filter(|&b| column[b] != column[a]).collect();
    let b = partners[rng.random_range(0..partners.len())];
    Some((a.min(b), a.max(b)))
}

/// Every attribute column replaced by an independent uniform permutation of itself.
pub fn randperm_dataset(dataset: &Dataset, seed: u64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let n = dataset.n_objects();
    let m_count = dataset.n_attributes();
    let mut values = dataset.values().to_vec();
    for m in 0..m_count {
        let mut column: Vec<Category> = (0..n).map(|i| values[i * m_count + m]).collect();
        column.shuffle(&mut rng);
        for (i, v) in column.into_iter().enumerate() {
            values[i * m_count + m] = v;
        }
    }
    dataset.with_values(values)
}

pub fn randomize(dataset: &Dataset, method: NullMethod, seed: u64) -> Dataset {
    match method {
        NullMethod::Swap => swap_dataset(dataset, seed),
        NullMethod::Randperm => randperm_dataset(dataset, seed),
    }
}

/// A reproducible set of null datasets derived from one base seed.
#[derive(Debug, Clone)]
pub struct RandomizedGroup {
    method: NullMethod,
    base_seed: u64,
    datasets: Vec<Dataset>,
}

impl RandomizedGroup {
    pub fn method(&self) -> NullMethod {
        self.method
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn len(&self) -> usize {
        self.datasets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.datasets.is_empty()
    }

    pub fn datasets(&self) -> &[Dataset] {
        &self.datasets
    }

    /// Locally optimal objective value on every null dataset, in group order.
    ///
    /// Run `i` uses `derive_seed(config.seed, i)`, so the result does not
    /// depend on how the runs are scheduled across threads.
    pub fn null_values(&self, config: &SearchConfig) -> Result<Vec<f64>> {
        self.datasets
            .par_iter()
            .enumerate()
            .map(|(i, ds)| {
                let cfg = config.with_seed(derive_seed(config.seed, i as u64));
                ksigcat_run(ds, &cfg).map(|p| p.objective_value)
            })
            .collect()
    }
}

/// `size` null datasets; dataset `i` is generated from `derive_seed(base_seed, i)`.
pub fn generate_group(dataset: &Dataset, size: usize, method: NullMethod, base_seed: u64) -> Result<RandomizedGroup> {
    generate_group_with_swaps(dataset, size, method, 1, base_seed)
}

pub fn generate_group_with_swaps(
    dataset: &Dataset,
    size: usize,
    method: NullMethod,
    swaps: usize,
    base_seed: u64,
) -> Result<RandomizedGroup> {
    if size == 0 {
        return Err(Error::InvalidArgument("group size must be >= 1".to_owned()));
    }
    let datasets = (0..size)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(base_seed, i as u64);
            match method {
                NullMethod::Swap => swap_dataset_n(dataset, swaps, seed),
                NullMethod::Randperm => randperm_dataset(dataset, seed),
            }
        })
        .collect();
    Ok(RandomizedGroup {
        method,
        base_seed,
        datasets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2_like() -> Dataset {
        let rows: Vec<Vec<u32>> = (0..9).map(|i| vec![i / 3, i / 3]).collect();
        Dataset::from_codes(&rows).unwrap()
    }

    fn changed_cells(a: &Dataset, b: &Dataset, m: usize) -> Vec<usize> {
        (0..a.n_objects()).filter(|&i| a.value(i, m) != b.value(i, m)).collect()
    }

    #[test]
    fn swap_touches_exactly_two_cells_per_attribute() {
        let ds = fig2_like();
        for seed in 0..50 {
            let out = swap_dataset(&ds, seed);
            for m in 0..2 {
                let changed = changed_cells(&ds, &out, m);
                assert_eq!(changed.len(), 2);
                let (a, b) = (changed[0], changed[1]);
                assert_eq!(out.value(a, m), ds.value(b, m));
                assert_eq!(out.value(b, m), ds.value(a, m));
            }
            assert_eq!(out.histograms(), ds.histograms());
        }
    }

    #[test]
    fn constant_attribute_is_untouched() {
        let ds = Dataset::from_codes(&[vec![0, 1], vec![0, 2], vec![0, 1]]).unwrap();
        let out = swap_dataset(&ds, 3);
        assert_eq!(out.column(0), ds.column(0));
        assert_eq!(changed_cells(&ds, &out, 1).len(), 2);
    }

    #[test]
    fn fallback_finds_the_rare_pair() {
        // One odd value among many: rejection sampling rarely hits it.
        let mut column = vec![0u32; 5000];
        column[1234] = 1;
        let mut rng = rng_from_seed(8);
        let (a, b) = pick_distinct_pair(&column, 2, &mut rng).unwrap();
        assert!(a == 1234 || b == 1234);
        assert_ne!(column[a], column[b]);
    }

    #[test]
    fn randperm_preserves_histograms() {
        let ds = fig2_like();
        let out = randperm_dataset(&ds, 11);
        assert_eq!(out.histograms(), ds.histograms());
        let single = Dataset::from_codes(&[vec![3, 4]]).unwrap();
        assert_eq!(randperm_dataset(&single, 5).row(0), single.row(0));
    }

    #[test]
    fn group_is_reproducible() {
        let ds = fig2_like();
        let a = generate_group(&ds, 20, NullMethod::Swap, 99).unwrap();
        let b = generate_group(&ds, 20, NullMethod::Swap, 99).unwrap();
        assert_eq!(a.len(), 20);
        for (x, y) in a.datasets().iter().zip(b.datasets()) {
            assert_eq!(x.values(), y.values());
        }
        assert!(generate_group(&ds, 0, NullMethod::Swap, 1).is_err());
        let cfg = SearchConfig::new(3, 4);
        assert_eq!(a.null_values(&cfg).unwrap(), b.null_values(&cfg).unwrap());
    }

    #[test]
    fn method_parses() {
        assert_eq!("swap".parse::<NullMethod>().unwrap(), NullMethod::Swap);
        assert_eq!("randperm".parse::<NullMethod>().unwrap(), NullMethod::Randperm);
        assert!("shuffle".parse::<NullMethod>().is_err());
    }
}
