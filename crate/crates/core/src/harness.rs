//! Repeated-run protocols: many seeds per algorithm, many null groups per
//! p-value, many repetitions of cluster-number estimation.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{kmodes_run, DEFAULT_MAX_ITERS};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{acc, nmi, pairwise_f_measure};
use crate::model_selection::{estimate_k, EstimateConfig, EstimationReport};
use crate::objective::{srs_full, Objective};
use crate::randomize::{generate_group, NullMethod};
use crate::rng::derive_seed;
use crate::search::{ksigcat_run, Partition, SearchConfig};
use crate::significance::{empirical_pvalue, PValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ksigcat,
    Kmodes,
    Entropy,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Ksigcat => "ksigcat",
            Algorithm::Kmodes => "kmodes",
            Algorithm::Entropy => "entropy",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ksigcat" => Ok(Algorithm::Ksigcat),
            "kmodes" => Ok(Algorithm::Kmodes),
            "entropy" => Ok(Algorithm::Entropy),
            other => Err(Error::InvalidArgument(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// One clustering run; the reported objective is always SRS.
pub fn run_algorithm(dataset: &Dataset, algorithm: Algorithm, k: usize, seed: u64) -> Result<Partition> {
    match algorithm {
        Algorithm::Ksigcat => ksigcat_run(dataset, &SearchConfig::new(k, seed)),
        Algorithm::Kmodes => kmodes_run(dataset, k, seed, DEFAULT_MAX_ITERS),
        Algorithm::Entropy => {
            let cfg = SearchConfig::new(k, seed).with_objective(Objective::ExpectedEntropy);
            let mut p = ksigcat_run(dataset, &cfg)?;
            p.objective_value = srs_full(dataset, &p.assignments, k)?;
            Ok(p)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub srs: f64,
    pub acc: f64,
    pub nmi: f64,
    pub f_measure: f64,
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: Algorithm,
    pub k: usize,
    pub runs: Vec<RunRecord>,
    pub mean_acc: f64,
    pub mean_nmi: f64,
    pub mean_f_measure: f64,
    pub mean_srs: f64,
    pub mean_runtime_secs: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// `runs` independent executions; run `i` is seeded with `derive_seed(base_seed, i)`.
pub fn repeated_runs(
    dataset: &Dataset,
    truth: &[usize],
    algorithm: Algorithm,
    k: usize,
    runs: usize,
    base_seed: u64,
) -> Result<RunSummary> {
    if truth.len() != dataset.n_objects() {
        return Err(Error::LengthMismatch {
            expected: dataset.n_objects(),
            got: truth.len(),
        });
    }
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be >= 1".to_owned()));
    }
    let records = (0..runs)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(base_seed, i as u64);
            let start = Instant::now();
            let p = run_algorithm(dataset, algorithm, k, seed)?;
            let runtime_secs = start.elapsed().as_secs_f64();
            Ok(RunRecord {
                seed,
                srs: p.objective_value,
                acc: acc(&p.assignments, truth)?,
                nmi: nmi(&p.assignments, truth)?,
                f_measure: pairwise_f_measure(&p.assignments, truth)?,
                runtime_secs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunSummary {
        algorithm,
        k,
        mean_acc: mean(records.iter().map(|r| r.acc)),
        mean_nmi: mean(records.iter().map(|r| r.nmi)),
        mean_f_measure: mean(records.iter().map(|r| r.f_measure)),
        mean_srs: mean(records.iter().map(|r| r.srs)),
        mean_runtime_secs: mean(records.iter().map(|r| r.runtime_secs)),
        runs: records,
    })
}

/// Observed search plus a fresh null group, seeded from `seed` alone.
pub fn pvalue_once(dataset: &Dataset, k: usize, group_size: usize, method: NullMethod, seed: u64) -> Result<PValue> {
    let config = SearchConfig::new(k, derive_seed(seed, 0));
    let observed = ksigcat_run(dataset, &config)?;
    let group = generate_group(dataset, group_size, method, derive_seed(seed, 1))?;
    empirical_pvalue(observed.objective_value, &group, &config.with_seed(derive_seed(seed, 2)))
}

/// `repetitions` independent p-values; repetition `i` uses `derive_seed(base_seed, i)`.
pub fn pvalue_repetitions(
    dataset: &Dataset,
    k: usize,
    group_size: usize,
    method: NullMethod,
    repetitions: usize,
    base_seed: u64,
) -> Result<Vec<PValue>> {
    (0..repetitions)
        .map(|i| pvalue_once(dataset, k, group_size, method, derive_seed(base_seed, i as u64)))
        .collect()
}

/// `repetitions` independent estimates; repetition `i` reseeds `config` with
/// `derive_seed(config.seed, i)`.
pub fn estimate_repetitions(dataset: &Dataset, config: &EstimateConfig, repetitions: usize) -> Result<Vec<EstimationReport>> {
    (0..repetitions)
        .map(|i| {
            let mut cfg = config.clone();
            cfg.seed = derive_seed(config.seed, i as u64);
            estimate_k(dataset, &cfg)
        })
        .collect()
}

/// Most frequent value, smallest on ties; `None` for an empty input.
pub fn mode(values: &[usize]) -> Option<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let mut best: Option<(usize, usize)> = None;
    for chunk in sorted.chunk_by(|a, b| a == b) {
        if best.is_none_or(|(_, n)| chunk.len() > n) {
            best = Some((chunk[0], chunk.len()));
        }
    }
    best.map(|(v, _)| v)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 0 {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks() -> (Dataset, Vec<usize>) {
        let mut rows = Vec::new();
        let mut truth = Vec::new();
        for g in 0..3u32 {
            for i in 0..10u32 {
                rows.push(vec![g, g, g, (g + i) % 4]);
                truth.push(g as usize);
            }
        }
        (Dataset::from_codes(&rows).unwrap(), truth)
    }

    #[test]
    fn summaries_are_deterministic_apart_from_runtime() {
        let (ds, truth) = blocks();
        for alg in [Algorithm::Ksigcat, Algorithm::Kmodes, Algorithm::Entropy] {
            let a = repeated_runs(&ds, &truth, alg, 3, 6, 4).unwrap();
            let b = repeated_runs(&ds, &truth, alg, 3, 6, 4).unwrap();
            assert_eq!(a.runs.len(), 6);
            assert_eq!(a.mean_acc, b.mean_acc);
            assert_eq!(a.mean_srs, b.mean_srs);
            assert!((0.0..=1.0).contains(&a.mean_acc));
        }
        assert!(repeated_runs(&ds, &truth[1..], Algorithm::Ksigcat, 3, 2, 0).is_err());
    }

    #[test]
    fn pvalue_on_structured_data_is_small() {
        let (ds, _) = blocks();
        let p = pvalue_once(&ds, 3, 20, NullMethod::Randperm, 7).unwrap();
        assert_eq!(p.null_srs.len(), 20);
        assert!(p.p_value <= 0.05);
    }

    #[test]
    fn mode_and_median() {
        assert_eq!(mode(&[3, 2, 3, 2, 5]), Some(2));
        assert_eq!(mode(&[7]), Some(7));
        assert_eq!(mode(&[]), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0]), Some(2.5));
    }

    #[test]
    fn algorithm_parses() {
        assert_eq!("kmodes".parse::<Algorithm>().unwrap(), Algorithm::Kmodes);
        assert!("dbscan".parse::<Algorithm>().is_err());
    }
}
