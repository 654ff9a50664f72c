//! Per-attribute 1-D k-means, used to turn a numeric table into a
//! categorical one.

use rand::Rng;

use super::{Category, Dataset};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

const MAX_LLOYD_ITERS: usize = 100;
const RESTARTS: usize = 10;

/// Discretizes every column independently into at most `k` categories,
/// keeping the lowest within-cluster sum of squares over 10 k-means++ starts.
///
/// Columns with fewer than `k` distinct values get one category per distinct
/// value instead.
pub fn discretize_numeric(columns: &[Vec<f64>], k: usize, seed: u64) -> Result<Dataset> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be >= 2, got {k}")));
    }
    let n = columns.first().map_or(0, Vec::len);
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut coded: Vec<Vec<Category>> = vec![Vec::with_capacity(columns.len()); n];
    for (m, col) in columns.iter().enumerate() {
        if col.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: col.len() });
        }
        if let Some(row) = col.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row, column: m });
        }
        let labels = match distinct_count(col) {
            d if d < k => {
                log::warn!("column {m}: {d} distinct values < k={k}; one category per value");
                distinct_codes(col)
            }
            _ => {
                let mut rng = rng_from_seed(derive_seed(seed, m as u64));
                (0..RESTARTS)
                    .map(|_| {
                        let labels = kmeans_1d(col, k, &mut rng);
                        (within_ss(col, &labels, k), labels)
                    })
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .map(|(_, labels)| labels)
                    .expect("at least one restart")
            }
        };
        for (row, label) in coded.iter_mut().zip(labels) {
            row.push(label as Category);
        }
    }
    Dataset::from_codes(&coded)
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn distinct_count(values: &[f64]) -> usize {
    let mut v = sorted_copy(values);
    v.dedup();
    v.len()
}

fn distinct_codes(values: &[f64]) -> Vec<usize> {
    let mut uniq = sorted_copy(values);
    uniq.dedup();
    values
        .iter()
        .map(|x| uniq.binary_search_by(|u| u.total_cmp(x)).unwrap_or(0))
        .collect()
}

/// k-means on scalars: k-means++ seeding, then Lloyd iterations until the
/// assignment is stable (at most 100 rounds). Requires at least `k` distinct
/// values.
pub fn kmeans_1d<R: Rng>(values: &[f64], k: usize, rng: &mut R) -> Vec<usize> {
    let n = values.len();
    let mut centers = plus_plus_seeds(values, k, rng);
    let mut labels = vec![usize::MAX; n];
    for _ in 0..MAX_LLOYD_ITERS {
        let mut changed = false;
        for (x, label) in values.iter().zip(labels.iter_mut()) {
            let best = nearest(&centers, *x);
            if best != *label {
                *label = best;
                changed = true;
            }
        }
        repair_empty(values, &mut labels, &centers, k);
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (x, &l) in values.iter().zip(&labels) {
            sums[l] += x;
            counts[l] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c] / counts[c] as f64;
            }
        }
        if !changed {
            break;
        }
    }
    labels
}

/// Within-cluster sum of squared deviations from the cluster means.
pub fn within_ss(values: &[f64], labels: &[usize], k: usize) -> f64 {
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (x, &l) in values.iter().zip(labels) {
        sums[l] += x;
        counts[l] += 1;
    }
    values
        .iter()
        .zip(labels)
        .map(|(x, &l)| (x - sums[l] / counts[l] as f64).powi(2))
        .sum()
}

fn nearest(centers: &[f64], x: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, &center) in centers.iter().enumerate() {
        let d = (x - center).abs();
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

fn plus_plus_seeds<R: Rng>(values: &[f64], k: usize, rng: &mut R) -> Vec<f64> {
    let n = values.len();
    let mut centers = Vec::with_capacity(k);
    centers.push(values[rng.random_range(0..n)]);
    let mut dist2: Vec<f64> = values.iter().map(|x| (x - centers[0]).powi(2)).collect();
    while centers.len() < k {
        let total: f64 = dist2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, d) in dist2.iter().enumerate() {
                if target < *d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        let c = values[next];
        centers.push(c);
        for (d, x) in dist2.iter_mut().zip(values) {
            *d = d.min((x - c).powi(2));
        }
    }
    centers
}

// An empty cluster takes the point farthest from its current centroid,
// drawn from clusters that have more than one member.
fn repair_empty(values: &[f64], labels: &mut [usize], centers: &[f64], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let donor = values
            .iter()
            .enumerate()
            .filter(|(i, _)| counts[labels[*i]] > 1)
            .max_by(|(i, x), (j, y)| {
                let di = (*x - centers[labels[*i]]).abs();
                let dj = (*y - centers[labels[*j]]).abs();
                di.total_cmp(&dj).then(j.cmp(i))
            })
            .map(|(i, _)| i);
        match donor {
            Some(i) => labels[i] = empty,
            None => return,
        }
    }
}
