//! Monte Carlo local search over partitions with a fixed number of clusters.
//!
//! The search starts with every object in cluster 0 and the other `K - 1`
//! clusters empty. Each step picks an object uniformly at random and a
//! destination uniformly among the other `K - 1` clusters; the move is kept
//! only if it strictly lowers the objective. The run stops after `N (K - 1)`
//! consecutive rejected steps.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::objective::{ClusterCounts, Objective};
use crate::rng::{rng_from_seed, SearchRng};

/// Assignment of every object to one of `k` clusters. Empty clusters are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub assignments: Vec<usize>,
    pub k: usize,
    /// Objective of this partition under the objective that produced it.
    pub objective_value: f64,
}

impl Partition {
    /// All objects in cluster 0.
    pub fn trivial(dataset: &Dataset, k: usize, objective: Objective) -> Result<Self> {
        let assignments = vec![0; dataset.n_objects()];
        let objective_value = crate::objective::evaluate(dataset, &assignments, k, objective)?;
        Ok(Self {
            assignments,
            k,
            objective_value,
        })
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignments {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn n_nonempty(&self) -> usize {
        self.cluster_sizes().iter().filter(|&&s| s > 0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub k: usize,
    pub seed: u64,
    pub objective: Objective,
    /// Consecutive rejections before stopping; `None` means `N (K - 1)`.
    pub failure_budget: Option<usize>,
}

impl SearchConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            objective: Objective::Srs,
            failure_budget: None,
        }
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_failure_budget(mut self, budget: usize) -> Self {
        self.failure_budget = Some(budget);
        self
    }

    pub fn budget_for(&self, n_objects: usize) -> usize {
        self.failure_budget
            .unwrap_or(n_objects * self.k.saturating_sub(1))
            .max(1)
    }
}

/// Mutable state of one search run: assignments plus matching counts.
#[derive(Debug, Clone)]
pub struct SearchState<'a> {
    dataset: &'a Dataset,
    assignments: Vec<usize>,
    counts: ClusterCounts,
}

impl<'a> SearchState<'a> {
    pub fn new(dataset: &'a Dataset, assignments: Vec<usize>, k: usize, objective: Objective) -> Result<Self> {
        let counts = ClusterCounts::new(dataset, &assignments, k, objective)?;
        Ok(Self {
            dataset,
            assignments,
            counts,
        })
    }

    pub fn all_in_one(dataset: &'a Dataset, k: usize, objective: Objective) -> Result<Self> {
        Self::new(dataset, vec![0; dataset.n_objects()], k, objective)
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn counts(&self) -> &ClusterCounts {
        &self.counts
    }

    pub fn value(&self) -> f64 {
        self.counts.value()
    }

    pub fn into_partition(self) -> Partition {
        Partition {
            objective_value: self.counts.value(),
            k: self.counts.k(),
            assignments: self.assignments,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub accepted: bool,
    pub delta: f64,
}

/// One random single-object move, kept only if it strictly improves the
/// objective. `O(M)` for SRS.
pub fn local_search_step<R: Rng>(state: &mut SearchState<'_>, rng: &mut R) -> StepOutcome {
    let k = state.counts.k();
    if k < 2 {
        return StepOutcome {
            accepted: false,
            delta: 0.0,
        };
    }
    let object = rng.random_range(0..state.assignments.len());
    let from = state.assignments[object];
    // Uniform over the k - 1 clusters other than `from`.
    let mut to = rng.random_range(0..k - 1);
    if to >= from {
        to += 1;
    }
    let row = state.dataset.row(object);
    let delta = state.counts.delta_unchecked(row, from, to);
    let accepted = delta < 0.0;
    if accepted {
        state.counts.commit_unchecked(row, from, to, delta);
        state.assignments[object] = to;
    }
    StepOutcome { accepted, delta }
}

/// Counters from one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    /// Total local-search steps.
    pub steps: u64,
    pub accepted: u64,
}

/// Runs the local search to a local optimum.
pub fn ksigcat_run(dataset: &Dataset, config: &SearchConfig) -> Result<Partition> {
    ksigcat_run_with_stats(dataset, config).map(|(p, _)| p)
}

pub fn ksigcat_run_with_stats(dataset: &Dataset, config: &SearchConfig) -> Result<(Partition, RunStats)> {
    let n = dataset.n_objects();
    if config.k < 1 || config.k > n {
        return Err(Error::InvalidClusterCount { k: config.k, n });
    }
    let mut state = SearchState::all_in_one(dataset, config.k, config.objective)?;
    let mut stats = RunStats::default();
    if config.k == 1 {
        return Ok((state.into_partition(), stats));
    }
    let budget = config.budget_for(n);
    let mut rng: SearchRng = rng_from_seed(config.seed);
    let mut failures = 0;
    while failures < budget {
        let outcome = local_search_step(&mut state, &mut rng);
        stats.steps += 1;
        if outcome.accepted {
            stats.accepted += 1;
            failures = 0;
        } else {
            failures += 1;
        }
    }
    Ok((state.into_partition(), stats))
}

/// Same search machinery with the expected-entropy objective.
pub fn entropy_search_run(dataset: &Dataset, k: usize, seed: u64) -> Result<Partition> {
    ksigcat_run(dataset, &SearchConfig::new(k, seed).with_objective(Objective::ExpectedEntropy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{evaluate, srs_full};
    use rand::Rng;

    fn three_groups() -> Dataset {
        let mut rows = Vec::new();
        for g in ["a", "b", "c"] {
            for _ in 0..3 {
                rows.push(vec![g.to_owned(), format!("{g}{g}")]);
            }
        }
        Dataset::from_tokens(&rows).unwrap()
    }

    #[test]
    fn recovers_perfect_clusters() {
        let ds = three_groups();
        let mut hits = 0;
        for seed in 0..20 {
            let p = ksigcat_run(&ds, &SearchConfig::new(3, seed)).unwrap();
            assert!((p.objective_value - srs_full(&ds, &p.assignments, 3).unwrap()).abs() < 1e-9);
            if p.objective_value.abs() < 1e-9 {
                hits += 1;
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn deterministic_per_seed() {
        let ds = three_groups();
        let a = ksigcat_run(&ds, &SearchConfig::new(3, 77)).unwrap();
        let b = ksigcat_run(&ds, &SearchConfig::new(3, 77)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn k_one_is_trivial() {
        let ds = three_groups();
        let p = ksigcat_run(&ds, &SearchConfig::new(1, 0)).unwrap();
        assert!(p.assignments.iter().all(|&c| c == 0));
        assert!((p.objective_value - srs_full(&ds, &p.assignments, 1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn bad_k_is_rejected() {
        let ds = three_groups();
        assert!(ksigcat_run(&ds, &SearchConfig::new(0, 0)).is_err());
        assert!(ksigcat_run(&ds, &SearchConfig::new(10, 0)).is_err());
    }

    #[test]
    fn no_move_leaves_the_optimum() {
        let ds = Dataset::from_tokens(&[vec!["a"], vec!["a"], vec!["b"], vec!["b"]]).unwrap();
        let mut state = SearchState::new(&ds, vec![0, 0, 1, 1], 2, Objective::Srs).unwrap();
        let mut rng = rng_from_seed(1);
        for _ in 0..1000 {
            assert!(!local_search_step(&mut state, &mut rng).accepted);
        }
        assert_eq!(state.assignments(), &[0, 0, 1, 1]);
    }

    #[test]
    fn steps_accept_only_strict_improvements() {
        let mut rng = rng_from_seed(4);
        let rows: Vec<Vec<u32>> = (0..40).map(|_| (0..6).map(|_| rng.random_range(0..3)).collect()).collect();
        let ds = Dataset::from_codes(&rows).unwrap();
        for objective in [Objective::Srs, Objective::ExpectedEntropy] {
            let mut state = SearchState::all_in_one(&ds, 4, objective).unwrap();
            let initial = state.value();
            let mut accepted_sum = 0.0;
            for _ in 0..10_000 {
                let before = state.assignments().to_vec();
                let out = local_search_step(&mut state, &mut rng);
                if out.accepted {
                    assert!(out.delta < 0.0);
                    accepted_sum += out.delta;
                } else {
                    assert_eq!(state.assignments(), &before[..]);
                }
                assert_eq!(state.counts().cluster_sizes().iter().sum::<usize>(), 40);
            }
            let fresh = evaluate(&ds, state.assignments(), 4, objective).unwrap();
            assert!((state.value() - fresh).abs() < 1e-6);
            assert!((initial + accepted_sum - fresh).abs() < 1e-6);
        }
    }

    #[test]
    fn entropy_search_finds_pure_partition() {
        let ds = three_groups();
        let best = (0..20)
            .map(|s| entropy_search_run(&ds, 3, s).unwrap().objective_value)
            .fold(f64::INFINITY, f64::min);
        assert!(best.abs() < 1e-9);
    }

    #[test]
    fn budget_defaults_to_n_times_k_minus_one() {
        assert_eq!(SearchConfig::new(3, 0).budget_for(10), 20);
        assert_eq!(SearchConfig::new(3, 0).with_failure_budget(5).budget_for(10), 5);
        assert_eq!(SearchConfig::new(1, 0).budget_for(10), 1);
    }
}
