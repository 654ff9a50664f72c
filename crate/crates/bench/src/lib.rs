//! Synthetic workloads shared by the benchmarks.

use rand::Rng;
use sigcat_core::rng::rng_from_seed;
use sigcat_core::Dataset;

/// `n` objects drawn from `k` planted clusters. Each cluster has a preferred
/// category per attribute, taken with probability `purity`; otherwise the
/// value is uniform over `q` categories.
pub fn planted(n: usize, m: usize, q: u32, k: usize, purity: f64, seed: u64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let centers: Vec<Vec<u32>> = (0..k).map(|_| (0..m).map(|_| rng.random_range(0..q)).collect()).collect();
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let center = &centers[i % k];
            center
                .iter()
                .map(|&c| if rng.random_bool(purity) { c } else { rng.random_range(0..q) })
                .collect()
        })
        .collect();
    Dataset::from_codes(&rows).expect("non-empty synthetic data")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let a = planted(50, 6, 4, 3, 0.8, 1);
        assert_eq!((a.n_objects(), a.n_attributes()), (50, 6));
        let b = planted(50, 6, 4, 3, 0.8, 1);
        assert_eq!(a.histograms(), b.histograms());
    }
}
