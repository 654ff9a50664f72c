//! Partition objectives over per-cluster category counts.
//!
//! With `f(n) = n ln n` (and `f(0) = 0`), `N_k` the size of cluster `k` and
//! `N_kmq` the number of its objects taking category `q` on attribute `m`:
//!
//! * SRS  = `M * sum_k f(N_k) - sum_{k,m,q} f(N_kmq)`
//! * SRS' = `M * sum_k f(N_k) - sum_{k,m,q} f(N_k - N_kmq)`
//! * EE   = `(1/N) * sum_k [Q f(N_k) - sum_{m,q} f(N_kmq) - sum_{m,q} f(N_k - N_kmq)]`
//!
//! SRS is the negated maximized log-likelihood of the per-cluster independent
//! multinomial model, i.e. the partition-dependent part of `-2 ln Lambda`
//! (halved). Lower is more homogeneous. EE is the expected-entropy objective
//! used by the entropy baseline.
//!
//! [`ClusterCounts`] keeps the counts for one partition plus the cached
//! objective value. A single-object move is evaluated in `O(M)` for SRS
//! (`O(Q)` for EE) by [`ClusterCounts::delta_move`] without touching state;
//! [`ClusterCounts::commit_move`] applies it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::{Category, Dataset};
use crate::error::{Error, Result};

/// `n ln n` with `0 ln 0 = 0`.
#[inline]
pub fn xlogx(n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        let x = n as f64;
        x * x.ln()
    }
}

/// Which function of the counts a search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    Srs,
    #[serde(rename = "ee")]
    ExpectedEntropy,
}

/// Per-cluster sizes and category frequencies for one partition.
///
/// Frequencies live in one flat table indexed by
/// `cluster * Q + offset[m] + q`, so every `(cluster, attribute, category)`
/// lookup is a single index computation.
#[derive(Debug, Clone)]
pub struct ClusterCounts {
    objective: Objective,
    n_objects: usize,
    n_attributes: usize,
    total_categories: usize,
    offsets: Arc<[usize]>,
    sizes: Vec<usize>,
    freq: Vec<u32>,
    value: f64,
    f: Arc<[f64]>,
}

impl ClusterCounts {
    pub fn new(dataset: &Dataset, assignments: &[usize], k: usize, objective: Objective) -> Result<Self> {
        validate_assignments(dataset, assignments, k)?;
        let q = dataset.total_categories();
        let offsets: Arc<[usize]> = dataset.category_offsets().into();
        let mut sizes = vec![0usize; k];
        let mut freq = vec![0u32; k * q];
        for (row, &c) in dataset.rows().zip(assignments) {
            sizes[c] += 1;
            let base = c * q;
            for (m, &v) in row.iter().enumerate() {
                freq[base + offsets[m] + v as usize] += 1;
            }
        }
        let f: Arc<[f64]> = (0..=dataset.n_objects() + 1).map(xlogx).collect();
        let mut counts = Self {
            objective,
            n_objects: dataset.n_objects(),
            n_attributes: dataset.n_attributes(),
            total_categories: q,
            offsets,
            sizes,
            freq,
            value: 0.0,
            f,
        };
        counts.value = counts.evaluate(objective);
        Ok(counts)
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn cluster_sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// `N_kmq`.
    pub fn frequency(&self, cluster: usize, attribute: usize, category: Category) -> usize {
        self.freq[self.slot(cluster, attribute, category)] as usize
    }

    /// Cached objective value, maintained through [`Self::commit_move`].
    pub fn value(&self) -> f64 {
        self.value
    }

    #[inline]
    fn slot(&self, cluster: usize, attribute: usize, category: Category) -> usize {
        cluster * self.total_categories + self.offsets[attribute] + category as usize
    }

    #[inline]
    fn fx(&self, n: usize) -> f64 {
        self.f[n]
    }

    /// Recomputes the chosen objective from the counts.
    pub fn evaluate(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Srs => self.srs(),
            Objective::ExpectedEntropy => self.expected_entropy(),
        }
    }

    pub fn srs(&self) -> f64 {
        let m = self.n_attributes as f64;
        let sizes: f64 = self.sizes.iter().map(|&s| self.fx(s)).sum();
        let cells: f64 = self.freq.iter().map(|&n| self.fx(n as usize)).sum();
        m * sizes - cells
    }

    pub fn srs_prime(&self) -> f64 {
        let m = self.n_attributes as f64;
        let q = self.total_categories;
        let mut sizes = 0.0;
        let mut complements = 0.0;
        for (k, &size) in self.sizes.iter().enumerate() {
            sizes += self.fx(size);
            complements += self.freq[k * q..(k + 1) * q]
                .iter()
                .map(|&n| self.fx(size - n as usize))
                .sum::<f64>();
        }
        m * sizes - complements
    }

    pub fn expected_entropy(&self) -> f64 {
        let total: f64 = (0..self.k()).map(|k| self.ee_cluster_term(k, None)).sum();
        total / self.n_objects as f64
    }

    /// `Q f(N_k) - sum f(N_kmq) - sum f(N_k - N_kmq)` for one cluster,
    /// optionally with `row` added (`+1`) or removed (`-1`).
    fn ee_cluster_term(&self, cluster: usize, change: Option<(&[Category], isize)>) -> f64 {
        let q = self.total_categories;
        let cells = &self.freq[cluster * q..(cluster + 1) * q];
        let (size, term) = match change {
            None => {
                let size = self.sizes[cluster];
                (size, cells.iter().map(|&n| self.fx(n as usize) + self.fx(size - n as usize)).sum::<f64>())
            }
            Some((row, d)) => {
                let size = (self.sizes[cluster] as isize + d) as usize;
                let mut adjusted = cells.to_vec();
                for (m, &v) in row.iter().enumerate() {
                    let slot = &mut adjusted[self.offsets[m] + v as usize];
                    *slot = (*slot as isize + d) as u32;
                }
                (size, adjusted.iter().map(|&n| self.fx(n as usize) + self.fx(size - n as usize)).sum::<f64>())
            }
        };
        q as f64 * self.fx(size) - term
    }

    fn check_move(&self, from: usize, to: usize) -> Result<()> {
        let k = self.k();
        if from >= k || to >= k {
            return Err(Error::InvalidMove(format!("cluster out of range ({from} -> {to}, k={k})")));
        }
        if from == to {
            return Err(Error::InvalidMove(format!("source and destination are both {from}")));
        }
        if self.sizes[from] == 0 {
            return Err(Error::InvalidMove(format!("cluster {from} is empty")));
        }
        Ok(())
    }

    /// Change in the objective if `row` (currently in `from`) moved to `to`.
    /// Does not modify the counts.
    pub fn delta_move(&self, row: &[Category], from: usize, to: usize) -> Result<f64> {
        self.check_move(from, to)?;
        Ok(self.delta_unchecked(row, from, to))
    }

    #[inline]
    pub(crate) fn delta_unchecked(&self, row: &[Category], from: usize, to: usize) -> f64 {
        match self.objective {
            Objective::Srs => self.srs_delta(row, from, to),
            Objective::ExpectedEntropy => self.ee_delta(row, from, to),
        }
    }

    #[inline]
    fn srs_delta(&self, row: &[Category], from: usize, to: usize) -> f64 {
        let na = self.sizes[from];
        let nb = self.sizes[to];
        let size_part = self.fx(na - 1) - self.fx(na) + self.fx(nb + 1) - self.fx(nb);
        let q = self.total_categories;
        let (base_a, base_b) = (from * q, to * q);
        let mut cell_part = 0.0;
        for (m, &v) in row.iter().enumerate() {
            let off = self.offsets[m] + v as usize;
            let a = self.freq[base_a + off] as usize;
            let b = self.freq[base_b + off] as usize;
            cell_part += self.fx(a - 1) - self.fx(a) + self.fx(b + 1) - self.fx(b);
        }
        self.n_attributes as f64 * size_part - cell_part
    }

    fn ee_delta(&self, row: &[Category], from: usize, to: usize) -> f64 {
        let before = self.ee_cluster_term(from, None) + self.ee_cluster_term(to, None);
        let after = self.ee_cluster_term(from, Some((row, -1))) + self.ee_cluster_term(to, Some((row, 1)));
        (after - before) / self.n_objects as f64
    }

    /// Applies a move and adds `delta` to the cached value.
    pub fn commit_move(&mut self, row: &[Category], from: usize, to: usize, delta: f64) -> Result<()> {
        self.check_move(from, to)?;
        for (m, &v) in row.iter().enumerate() {
            if self.freq[self.slot(from, m, v)] == 0 {
                return Err(Error::InvalidMove(format!(
                    "cluster {from} has no object with category {v} on attribute {m}"
                )));
            }
        }
        self.commit_unchecked(row, from, to, delta);
        Ok(())
    }

    #[inline]
    pub(crate) fn commit_unchecked(&mut self, row: &[Category], from: usize, to: usize, delta: f64) {
        self.sizes[from] -= 1;
        self.sizes[to] += 1;
        let q = self.total_categories;
        let (base_a, base_b) = (from * q, to * q);
        for (m, &v) in row.iter().enumerate() {
            let off = self.offsets[m] + v as usize;
            self.freq[base_a + off] -= 1;
            self.freq[base_b + off] += 1;
        }
        self.value += delta;
    }

    /// Replaces the cached value with a fresh evaluation.
    pub fn resync(&mut self) {
        self.value = self.evaluate(self.objective);
    }
}

pub(crate) fn validate_assignments(dataset: &Dataset, assignments: &[usize], k: usize) -> Result<()> {
    if assignments.len() != dataset.n_objects() {
        return Err(Error::LengthMismatch {
            expected: dataset.n_objects(),
            got: assignments.len(),
        });
    }
    if k == 0 {
        return Err(Error::InvalidClusterCount { k, n: dataset.n_objects() });
    }
    if let Some(bad) = assignments.iter().find(|&&c| c >= k) {
        return Err(Error::InvalidArgument(format!("assignment {bad} outside [0, {k})")));
    }
    Ok(())
}

/// SRS of a partition given as per-object cluster indices in `[0, k)`.
pub fn srs_full(dataset: &Dataset, assignments: &[usize], k: usize) -> Result<f64> {
    Ok(ClusterCounts::new(dataset, assignments, k, Objective::Srs)?.srs())
}

/// SRS' (complement-count variant of SRS).
pub fn srs_prime(dataset: &Dataset, assignments: &[usize], k: usize) -> Result<f64> {
    Ok(ClusterCounts::new(dataset, assignments, k, Objective::Srs)?.srs_prime())
}

pub fn expected_entropy(dataset: &Dataset, assignments: &[usize], k: usize) -> Result<f64> {
    Ok(ClusterCounts::new(dataset, assignments, k, Objective::ExpectedEntropy)?.expected_entropy())
}

pub fn evaluate(dataset: &Dataset, assignments: &[usize], k: usize, objective: Objective) -> Result<f64> {
    Ok(ClusterCounts::new(dataset, assignments, k, objective)?.evaluate(objective))
}

/// The two sides of the EE/SRS relation for one partition.
#[derive(Debug, Clone, Copy)]
pub struct EntropyRelation {
    pub ee: f64,
    pub srs: f64,
    pub srs_prime: f64,
    /// `EE - (SRS + SRS') / N`.
    pub gap: f64,
    /// `(Q - 2M)/N * sum_k f(N_k)`; equals `gap` exactly in exact arithmetic.
    pub closed_form: f64,
    /// `(SRS + SRS')/N + (1/N) sum_k (N/K - 2M) f(N_k)`.
    pub upper_bound: f64,
    /// `(SRS + SRS')/N - (M/N) sum_k f(N_k)`.
    pub lower_bound: f64,
}

/// Evaluates EE, SRS, SRS' and the expressions relating them.
pub fn entropy_relation(dataset: &Dataset, assignments: &[usize], k: usize) -> Result<EntropyRelation> {
    let counts = ClusterCounts::new(dataset, assignments, k, Objective::Srs)?;
    let n = dataset.n_objects() as f64;
    let m = dataset.n_attributes() as f64;
    let q = dataset.total_categories() as f64;
    let ee = counts.expected_entropy();
    let srs = counts.srs();
    let srs_prime = counts.srs_prime();
    let size_mass: f64 = counts.cluster_sizes().iter().map(|&s| xlogx(s)).sum();
    let base = (srs + srs_prime) / n;
    Ok(EntropyRelation {
        ee,
        srs,
        srs_prime,
        gap: ee - base,
        closed_form: (q - 2.0 * m) / n * size_mass,
        upper_bound: base + (n / k as f64 - 2.0 * m) / n * size_mass,
        lower_bound: base - m / n * size_mass,
    })
}
