//! Comparator algorithms: k-modes and the expected-entropy search.

use indexmap::IndexSet;
use rand::seq::index::sample;
use rand::Rng;

use crate::dataset::{Category, Dataset};
use crate::error::{Error, Result};
use crate::objective::srs_full;
use crate::rng::{rng_from_seed, SearchRng};
use crate::search::Partition;

pub use crate::search::entropy_search_run;

pub const DEFAULT_MAX_ITERS: usize = 100;

/// Result of one k-modes run; `partition.objective_value` is the SRS of the
/// final partition so it can be compared with the search output.
#[derive(Debug, Clone, PartialEq)]
pub struct KModesResult {
    pub partition: Partition,
    pub modes: Vec<Vec<Category>>,
    /// Sum of Hamming distances to the assigned mode after each iteration.
    pub cost_trace: Vec<usize>,
    pub iterations: usize,
}

fn hamming(a: &[Category], b: &[Category]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

// Nearest mode, lowest index on ties.
fn nearest(row: &[Category], modes: &[Vec<Category>]) -> (usize, usize) {
    modes
        .iter()
        .enumerate()
        .map(|(c, m)| (c, hamming(row, m)))
        .min_by_key(|&(c, d)| (d, c))
        .expect("at least one mode")
}

fn update_modes(dataset: &Dataset, assignments: &[usize], modes: &mut [Vec<Category>]) {
    let k = modes.len();
    for m in 0..dataset.n_attributes() {
        let q = dataset.categories_per_attribute()[m];
        let mut counts = vec![0usize; k * q];
        for (i, &c) in assignments.iter().enumerate() {
            counts[c * q + dataset.value(i, m) as usize] += 1;
        }
        for (c, mode) in modes.iter_mut().enumerate() {
            let slice = &counts[c * q..(c + 1) * q];
            if slice.iter().all(|&n| n == 0) {
                continue;
            }
            // Majority vote; ties go to the lowest category index.
            let best = slice
                .iter()
                .enumerate()
                .max_by_key(|&(v, &n)| (n, std::cmp::Reverse(v)))
                .map(|(v, _)| v)
                .unwrap_or(0);
            mode[m] = best as Category;
        }
    }
}

// Moves the object farthest from its mode into each empty cluster.
fn repair_empty(dataset: &Dataset, assignments: &mut [usize], modes: &mut [Vec<Category>]) {
    let k = modes.len();
    loop {
        let mut sizes = vec![0usize; k];
        for &c in assignments.iter() {
            sizes[c] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let donor = (0..assignments.len())
            .filter(|&i| sizes[assignments[i]] > 1)
            .max_by_key(|&i| (hamming(dataset.row(i), &modes[assignments[i]]), std::cmp::Reverse(i)));
        let Some(object) = donor else {
            return;
        };
        assignments[object] = empty;
        modes[empty] = dataset.row(object).to_vec();
    }
}

// `k` distinct rows when the data has that many, topped up with repeats otherwise.
fn initial_modes(dataset: &Dataset, k: usize, rng: &mut SearchRng) -> Vec<Vec<Category>> {
    let distinct: IndexSet<&[Category]> = dataset.rows().collect();
    let mut modes: Vec<Vec<Category>> = sample(rng, distinct.len(), k.min(distinct.len()))
        .into_iter()
        .map(|i| distinct[i].to_vec())
        .collect();
    if modes.len() < k {
        log::warn!("only {} distinct objects for k={k}; repeating initial modes", distinct.len());
        while modes.len() < k {
            modes.push(distinct[rng.random_range(0..distinct.len())].to_vec());
        }
    }
    modes
}

/// Lloyd-style k-modes from `k` distinct random objects as initial modes.
pub fn kmodes_run(dataset: &Dataset, k: usize, seed: u64, max_iters: usize) -> Result<Partition> {
    kmodes_detailed(dataset, k, seed, max_iters).map(|r| r.partition)
}

pub fn kmodes_detailed(dataset: &Dataset, k: usize, seed: u64, max_iters: usize) -> Result<KModesResult> {
    let n = dataset.n_objects();
    if k < 1 || k > n {
        return Err(Error::InvalidClusterCount { k, n });
    }
    let mut rng = rng_from_seed(seed);
    let mut modes = initial_modes(dataset, k, &mut rng);
    let mut assignments = vec![usize::MAX; n];
    let mut cost_trace = Vec::new();
    let mut iterations = 0;
    while iterations < max_iters.max(1) {
        iterations += 1;
        let mut changed = false;
        for (i, slot) in assignments.iter_mut().enumerate() {
            let row = dataset.row(i);
            let (c, d) = nearest(row, &modes);
            // Stay put on ties so a converged run cannot oscillate.
            let stays = *slot != usize::MAX && hamming(row, &modes[*slot]) == d;
            if !stays && *slot != c {
                *slot = c;
                changed = true;
            }
        }
        repair_empty(dataset, &mut assignments, &mut modes);
        update_modes(dataset, &assignments, &mut modes);
        cost_trace.push(
            assignments
                .iter()
                .enumerate()
                .map(|(i, &c)| hamming(dataset.row(i), &modes[c]))
                .sum(),
        );
        if !changed {
            break;
        }
    }
    let objective_value = srs_full(dataset, &assignments, k)?;
    Ok(KModesResult {
        partition: Partition {
            assignments,
            k,
            objective_value,
        },
        modes,
        cost_trace,
        iterations,
    })
}
