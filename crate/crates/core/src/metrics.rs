//! External evaluation against ground-truth labels.

use std::hash::Hash;

use indexmap::IndexSet;

use crate::error::{Error, Result};

/// Rows indexed by predicted label, columns by truth label, both in order of
/// first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contingency {
    pub counts: Vec<Vec<usize>>,
    pub n: usize,
}

impl Contingency {
    pub fn new<A: Hash + Eq, B: Hash + Eq>(predicted: &[A], truth: &[B]) -> Result<Self> {
        if predicted.len() != truth.len() {
            return Err(Error::LengthMismatch {
                expected: truth.len(),
                got: predicted.len(),
            });
        }
        if predicted.is_empty() {
            return Err(Error::EmptyInput);
        }
        let pred_idx = index_labels(predicted);
        let truth_idx = index_labels(truth);
        let rows = pred_idx.iter().max().map_or(0, |m| m + 1);
        let cols = truth_idx.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![vec![0; cols]; rows];
        for (&p, &t) in pred_idx.iter().zip(&truth_idx) {
            counts[p][t] += 1;
        }
        Ok(Self {
            counts,
            n: predicted.len(),
        })
    }

    fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<usize> {
        let cols = self.counts.first().map_or(0, Vec::len);
        (0..cols).map(|j| self.counts.iter().map(|r| r[j]).sum()).collect()
    }
}

fn index_labels<T: Hash + Eq>(labels: &[T]) -> Vec<usize> {
    let mut seen = IndexSet::new();
    labels.iter().map(|l| seen.insert_full(l).0).collect()
}

/// Fraction of objects matched under the best one-to-one mapping of
/// predicted clusters to truth classes.
pub fn acc<A: Hash + Eq, B: Hash + Eq>(predicted: &[A], truth: &[B]) -> Result<f64> {
    let table = Contingency::new(predicted, truth)?;
    let size = table.counts.len().max(table.counts[0].len());
    let mut weights = vec![vec![0i64; size]; size];
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            weights[i][j] = c as i64;
        }
    }
    let assignment = max_weight_assignment(&weights);
    let matched: i64 = assignment.iter().enumerate().map(|(i, &j)| weights[i][j]).sum();
    Ok(matched as f64 / table.n as f64)
}

/// Hungarian algorithm on a square matrix; returns the column assigned to
/// each row so that the total weight is maximal.
pub fn max_weight_assignment(weights: &[Vec<i64>]) -> Vec<usize> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    let top = weights.iter().flatten().copied().max().unwrap_or(0);
    // 1-based potentials over rows (u) and columns (v); p[j] = row matched to column j.
    let cost = |i: usize, j: usize| top - weights[i - 1][j - 1];
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    row_to_col
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// `(H(P) + H(T) - H(P, T)) / ((H(P) + H(T)) / 2)`; 0 when both sides have a single cluster.
pub fn nmi<A: Hash + Eq, B: Hash + Eq>(predicted: &[A], truth: &[B]) -> Result<f64> {
    let table = Contingency::new(predicted, truth)?;
    let n = table.n as f64;
    let hp = entropy(table.row_sums().into_iter(), n);
    let ht = entropy(table.col_sums().into_iter(), n);
    let denom = hp + ht;
    if denom == 0.0 {
        log::warn!("NMI undefined for two single-cluster labelings; returning 0");
        return Ok(0.0);
    }
    let joint = entropy(table.counts.iter().flatten().copied(), n);
    Ok((2.0 * (hp + ht - joint) / denom).clamp(0.0, 1.0))
}

/// Pairwise F-measure: precision and recall over object pairs placed
/// together. 1 when both labelings put no pair together.
pub fn pairwise_f_measure<A: Hash + Eq, B: Hash + Eq>(predicted: &[A], truth: &[B]) -> Result<f64> {
    let table = Contingency::new(predicted, truth)?;
    let pairs = |c: usize| (c * c.saturating_sub(1) / 2) as f64;
    let together: f64 = table.counts.iter().flatten().map(|&c| pairs(c)).sum();
    let pred_pairs: f64 = table.row_sums().into_iter().map(pairs).sum();
    let truth_pairs: f64 = table.col_sums().into_iter().map(pairs).sum();
    if pred_pairs == 0.0 && truth_pairs == 0.0 {
        return Ok(1.0);
    }
    if together == 0.0 {
        return Ok(0.0);
    }
    let precision = together / pred_pairs;
    let recall = together / truth_pairs;
    Ok(2.0 * precision * recall / (precision + recall))
}
