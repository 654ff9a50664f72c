//! Choosing the number of clusters from SRS values across `k`.
//!
//! * Gap*: `Gap(k) = mean_R SRS(X', k) - SRS(X, k)`, pick `argmax Gap(k) / (k * SD_k)`
//!   where `SD_k` is the sample standard deviation of the null values.
//! * BIC: `2 SRS(X, k) + k Q ln(M N)`, pick the minimum.
//! * BKPlot: second difference of the SRS curve, pick the maximum.
//!
//! All three read the same observed curve. Ties go to the smallest `k`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::randomize::{generate_group, NullMethod, RandomizedGroup};
use crate::rng::derive_seed;
use crate::search::{ksigcat_run, SearchConfig};

const OBSERVED_STREAM: u64 = 0x6f62_7365_7276_6564;
const NULL_SEARCH_STREAM: u64 = 0x6e75_6c6c_5f73_7263;
const GROUP_STREAM: u64 = 0x6772_6f75_705f_7365;

/// Observed SRS at each `k`, with `k = 1` at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrsCurve {
    pub values: Vec<f64>,
}

impl SrsCurve {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn k_max(&self) -> usize {
        self.values.len()
    }

    pub fn at(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
}

/// Best-of-`restarts` SRS for every `k` in `1..=k_max`. Run `(k, r)` is seeded
/// from `config.seed`, `k` and `r` only.
pub fn observed_curve(dataset: &Dataset, k_max: usize, config: &SearchConfig, restarts: usize) -> Result<SrsCurve> {
    if k_max > dataset.n_objects() {
        return Err(Error::InvalidClusterCount {
            k: k_max,
            n: dataset.n_objects(),
        });
    }
    let base = derive_seed(config.seed, OBSERVED_STREAM);
    let values = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            (0..restarts.max(1))
                .map(|r| {
                    let seed = derive_seed(derive_seed(base, k as u64), r as u64);
                    ksigcat_run(dataset, &config.with_k(k).with_seed(seed)).map(|p| p.objective_value)
                })
                .try_fold(f64::INFINITY, |best, v| v.map(|v| best.min(v)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SrsCurve { values })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub k: usize,
    pub observed: f64,
    pub null_mean: f64,
    /// Sample standard deviation (divisor `|R| - 1`); `None` when `|R| = 1`.
    pub null_sd: Option<f64>,
    pub gap: f64,
}

impl GapEntry {
    pub fn from_null(k: usize, observed: f64, null: &[f64]) -> Self {
        let (mean, sd) = mean_and_sd(null);
        Self {
            k,
            observed,
            null_mean: mean,
            null_sd: sd,
            gap: mean - observed,
        }
    }

    /// `Gap(k) / (k SD)`, or `None` when the spread is zero or undefined.
    pub fn gap_star_score(&self) -> Option<f64> {
        match self.null_sd {
            Some(sd) if sd > 0.0 => Some(self.gap / (self.k as f64 * sd)),
            _ => None,
        }
    }
}

fn mean_and_sd(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, Some((ss / (n - 1.0)).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapProfile {
    pub entries: Vec<GapEntry>,
}

/// Null SRS values for each `k` in `2..=k_max`, index 0 holding `k = 2`.
pub fn null_curves(group: &RandomizedGroup, k_max: usize, config: &SearchConfig) -> Result<Vec<Vec<f64>>> {
    let base = derive_seed(config.seed, NULL_SEARCH_STREAM);
    (2..=k_max)
        .map(|k| group.null_values(&config.with_k(k).with_seed(derive_seed(base, k as u64))))
        .collect()
}

pub fn gap_profile_from(curve: &SrsCurve, null: &[Vec<f64>]) -> Result<GapProfile> {
    if curve.k_max() < 2 || null.len() != curve.k_max() - 1 {
        return Err(Error::InvalidArgument(format!(
            "need null values for k = 2..={} (got {} sets)",
            curve.k_max(),
            null.len()
        )));
    }
    let entries = null
        .iter()
        .enumerate()
        .map(|(i, sample)| {
            let k = i + 2;
            if sample.is_empty() {
                return Err(Error::InvalidArgument(format!("empty null sample at k={k}")));
            }
            Ok(GapEntry::from_null(k, curve.at(k), sample))
        })
        .collect::<Result<_>>()?;
    Ok(GapProfile { entries })
}

/// Gap and SD for every `k` in `2..=k_max`.
pub fn gap_profile(dataset: &Dataset, group: &RandomizedGroup, k_max: usize, config: &SearchConfig) -> Result<GapProfile> {
    if k_max < 2 {
        return Err(Error::InvalidArgument(format!("k_max must be >= 2, got {k_max}")));
    }
    if group.is_empty() {
        return Err(Error::InvalidArgument("randomized group is empty".to_owned()));
    }
    let curve = observed_curve(dataset, k_max, config, 1)?;
    let null = null_curves(group, k_max, config)?;
    gap_profile_from(&curve, &null)
}

pub fn gap_star_select(profile: &GapProfile) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for entry in &profile.entries {
        match entry.gap_star_score() {
            Some(score) => {
                if best.is_none_or(|(_, b)| score > b) {
                    best = Some((entry.k, score));
                }
            }
            None => log::warn!("k={}: null SD is zero or undefined; excluded from Gap*", entry.k),
        }
    }
    best.map(|(k, _)| k).ok_or(Error::NoInformativeK)
}

/// `2 SRS(k) + k Q ln(M N)` for `k = 1..=k_max`.
pub fn bic_scores(dataset: &Dataset, curve: &SrsCurve) -> Vec<f64> {
    let q = dataset.total_categories() as f64;
    let sample = (dataset.n_attributes() * dataset.n_objects()) as f64;
    curve
        .values
        .iter()
        .enumerate()
        .map(|(i, srs)| 2.0 * srs + (i + 1) as f64 * q * sample.ln())
        .collect()
}

/// Smallest BIC over `k` in `2..=k_max`.
pub fn bic_select_from(dataset: &Dataset, curve: &SrsCurve) -> Result<usize> {
    if curve.k_max() < 2 {
        return Err(Error::InvalidArgument("BIC needs k_max >= 2".to_owned()));
    }
    let scores = bic_scores(dataset, curve);
    Ok(argbest(2..=curve.k_max(), |k| -scores[k - 1]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Score per `k`, index 0 holding `k = 1`; `None` where undefined.
    pub scores: Vec<Option<f64>>,
    pub k: usize,
}

pub fn bic_select(dataset: &Dataset, k_max: usize, config: &SearchConfig) -> Result<Selection> {
    let curve = observed_curve(dataset, k_max, config, 1)?;
    let k = bic_select_from(dataset, &curve)?;
    Ok(Selection {
        scores: bic_scores(dataset, &curve).into_iter().map(Some).collect(),
        k,
    })
}

/// `B(k)` for `k = 2..=k_max-2`, index 0 holding `k = 2`.
///
/// `S(k) = SRS(k) - SRS(k+1)`, `bS(k) = S(k) - S(k+1)`, `B(k) = bS(k-1) - bS(k)`.
pub fn bkplot_scores(curve: &SrsCurve) -> Result<Vec<f64>> {
    let k_max = curve.k_max();
    if k_max < 4 {
        return Err(Error::InvalidArgument(format!("BKPlot needs k_max >= 4, got {k_max}")));
    }
    let srs = &curve.values;
    // s[i] = S(i + 1), b[i] = bS(i + 1)
    let s: Vec<f64> = srs.windows(2).map(|w| w[0] - w[1]).collect();
    let b: Vec<f64> = s.windows(2).map(|w| w[0] - w[1]).collect();
    Ok((2..=k_max - 2).map(|k| b[k - 2] - b[k - 1]).collect())
}

pub fn bkplot_select_from(curve: &SrsCurve) -> Result<usize> {
    let scores = bkplot_scores(curve)?;
    Ok(argbest(2..=curve.k_max() - 2, |k| scores[k - 2]))
}

pub fn bkplot_select(dataset: &Dataset, k_max: usize, config: &SearchConfig) -> Result<Selection> {
    let curve = observed_curve(dataset, k_max, config, 1)?;
    let scores = bkplot_scores(&curve)?;
    let mut padded = vec![None; curve.k_max()];
    for (i, s) in scores.iter().enumerate() {
        padded[i + 1] = Some(*s);
    }
    Ok(Selection {
        scores: padded,
        k: bkplot_select_from(&curve)?,
    })
}

// First k with the largest score.
fn argbest(ks: std::ops::RangeInclusive<usize>, score: impl Fn(usize) -> f64) -> usize {
    let mut best_k = *ks.start();
    let mut best = f64::NEG_INFINITY;
    for k in ks {
        let s = score(k);
        if s > best {
            best = s;
            best_k = k;
        }
    }
    best_k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    GapStar,
    Bic,
    Bkplot,
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selector::GapStar => "gapstar",
            Selector::Bic => "bic",
            Selector::Bkplot => "bkplot",
        })
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gapstar" => Ok(Selector::GapStar),
            "bic" => Ok(Selector::Bic),
            "bkplot" => Ok(Selector::Bkplot),
            other => Err(Error::InvalidArgument(format!("unknown selector {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EstimateConfig {
    pub k_max: usize,
    pub group_size: usize,
    pub method: NullMethod,
    pub seed: u64,
    pub search: SearchConfig,
    pub selectors: Vec<Selector>,
    pub restarts: usize,
}

impl EstimateConfig {
    pub fn new(k_max: usize, seed: u64) -> Self {
        Self {
            k_max,
            group_size: 20,
            method: NullMethod::Swap,
            seed,
            search: SearchConfig::new(2, seed),
            selectors: vec![Selector::GapStar, Selector::Bic, Selector::Bkplot],
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KRecord {
    pub k: usize,
    pub srs_observed: f64,
    pub null_srs_mean: Option<f64>,
    pub null_srs_sd: Option<f64>,
    pub gap: Option<f64>,
    pub gap_star_score: Option<f64>,
    pub bic: f64,
    pub bkplot_b: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedK {
    pub gap_star_k: Option<usize>,
    pub bic_k: Option<usize>,
    pub bkplot_k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub k_max: usize,
    pub group_size: usize,
    pub method: NullMethod,
    pub seed: u64,
    pub records: Vec<KRecord>,
    pub selected: SelectedK,
}

/// Observed curve for `k = 1..=k_max`, null runs if Gap* is requested, and
/// every requested selector evaluated on the same curve.
pub fn estimate_k(dataset: &Dataset, config: &EstimateConfig) -> Result<EstimationReport> {
    let k_max = config.k_max;
    if k_max < 2 {
        return Err(Error::InvalidArgument(format!("k_max must be >= 2, got {k_max}")));
    }
    let search = config.search.with_seed(config.seed);
    let curve = observed_curve(dataset, k_max, &search, config.restarts)?;
    let wants = |s: Selector| config.selectors.contains(&s);

    let mut selected = SelectedK::default();
    let profile = if wants(Selector::GapStar) {
        let group = generate_group(dataset, config.group_size, config.method, derive_seed(config.seed, GROUP_STREAM))?;
        let null = null_curves(&group, k_max, &search)?;
        let profile = gap_profile_from(&curve, &null)?;
        selected.gap_star_k = Some(gap_star_select(&profile)?);
        Some(profile)
    } else {
        None
    };
    let bic = bic_scores(dataset, &curve);
    if wants(Selector::Bic) {
        selected.bic_k = Some(bic_select_from(dataset, &curve)?);
    }
    let bk = bkplot_scores(&curve).ok();
    if wants(Selector::Bkplot) {
        selected.bkplot_k = Some(bkplot_select_from(&curve)?);
    }

    let records = (1..=k_max)
        .map(|k| {
            let gap = profile.as_ref().and_then(|p| p.entries.iter().find(|e| e.k == k));
            KRecord {
                k,
                srs_observed: curve.at(k),
                null_srs_mean: gap.map(|e| e.null_mean),
                null_srs_sd: gap.and_then(|e| e.null_sd),
                gap: gap.map(|e| e.gap),
                gap_star_score: gap.and_then(GapEntry::gap_star_score),
                bic: bic[k - 1],
                bkplot_b: bk.as_ref().and_then(|b| (k >= 2 && k <= k_max.saturating_sub(2)).then(|| b[k - 2])),
            }
        })
        .collect();
    Ok(EstimationReport {
        k_max,
        group_size: config.group_size,
        method: config.method,
        seed: config.seed,
        records,
        selected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(k: usize, gap: f64, sd: f64) -> GapEntry {
        GapEntry {
            k,
            observed: 0.0,
            null_mean: gap,
            null_sd: Some(sd),
            gap,
        }
    }

    #[test]
    fn gap_star_arithmetic() {
        let profile = GapProfile {
            entries: vec![entry(2, 10.0, 1.0), entry(3, 12.0, 1.0)],
        };
        assert_eq!(gap_star_select(&profile).unwrap(), 2);
    }

    #[test]
    fn gap_is_null_mean_when_observed_is_zero() {
        let e = GapEntry::from_null(3, 0.0, &[4.0, 6.0]);
        assert_eq!(e.gap, 5.0);
        assert!((e.null_sd.unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_null_dataset_is_degenerate() {
        let e = GapEntry::from_null(2, 1.0, &[3.0]);
        assert_eq!(e.null_sd, None);
        assert_eq!(e.gap_star_score(), None);
        let profile = GapProfile { entries: vec![e] };
        assert!(matches!(gap_star_select(&profile), Err(Error::NoInformativeK)));
    }

    #[test]
    fn zero_sd_entries_are_skipped() {
        let profile = GapProfile {
            entries: vec![entry(2, 100.0, 0.0), entry(3, 3.0, 1.0)],
        };
        assert_eq!(gap_star_select(&profile).unwrap(), 3);
    }

    #[test]
    fn gap_star_ignores_common_shift() {
        let curve = SrsCurve::from_values(vec![50.0, 20.0, 12.0, 11.0]);
        let null = vec![vec![30.0, 33.0, 29.0], vec![25.0, 24.0, 28.0], vec![20.0, 23.0, 21.0]];
        let base = gap_star_select(&gap_profile_from(&curve, &null).unwrap()).unwrap();
        let c = 1234.5;
        let shifted_curve = SrsCurve::from_values(curve.values.iter().map(|v| v + c).collect());
        let shifted_null: Vec<Vec<f64>> = null.iter().map(|s| s.iter().map(|v| v + c).collect()).collect();
        let shifted = gap_star_select(&gap_profile_from(&shifted_curve, &shifted_null).unwrap()).unwrap();
        assert_eq!(base, shifted);
    }

    #[test]
    fn bkplot_hand_example() {
        let curve = SrsCurve::from_values(vec![100.0, 40.0, 35.0, 32.0, 30.0, 29.0]);
        assert_eq!(bkplot_scores(&curve).unwrap(), vec![53.0, 1.0, 0.0]);
        assert_eq!(bkplot_select_from(&curve).unwrap(), 2);
    }

    #[test]
    fn bkplot_linear_curve_ties_to_smallest() {
        let curve = SrsCurve::from_values((0..8).map(|i| 100.0 - 7.0 * i as f64).collect());
        assert!(bkplot_scores(&curve).unwrap().iter().all(|b| b.abs() < 1e-12));
        assert_eq!(bkplot_select_from(&curve).unwrap(), 2);
        assert!(bkplot_scores(&SrsCurve::from_values(vec![3.0, 2.0, 1.0])).is_err());
    }

    #[test]
    fn bic_zero_curve_picks_two() {
        let ds = Dataset::from_tokens(&[vec!["a"], vec!["a"], vec!["b"], vec!["b"]]).unwrap();
        let curve = SrsCurve::from_values(vec![0.0; 4]);
        let scores = bic_scores(&ds, &curve);
        assert!(scores.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(bic_select_from(&ds, &curve).unwrap(), 2);
        // Pure 2-partition of [a,a,b,b]: 2*0 + 2*2*ln(4).
        assert!((scores[1] - 4.0 * 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn estimate_report_shape() {
        let mut rows = Vec::new();
        for g in 0..3u32 {
            for i in 0..8u32 {
                rows.push(vec![g, g, g + (i % 2), g]);
            }
        }
        let ds = Dataset::from_codes(&rows).unwrap();
        let mut cfg = EstimateConfig::new(6, 5);
        cfg.group_size = 5;
        let report = estimate_k(&ds, &cfg).unwrap();
        assert_eq!(report.records.len(), 6);
        assert_eq!(report.records.iter().map(|r| r.k).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5, 6]);
        let sel = &report.selected;
        assert!((2..=6).contains(&sel.gap_star_k.unwrap()));
        assert!((2..=6).contains(&sel.bic_k.unwrap()));
        assert!((2..=4).contains(&sel.bkplot_k.unwrap()));
        assert!(report.records[0].gap.is_none());
        assert!(report.records[5].bkplot_b.is_none());
        assert_eq!(estimate_k(&ds, &cfg).unwrap(), report);
    }
}
