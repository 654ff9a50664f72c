//! Significance-based clustering of categorical data.
//!
//! A partition is scored by SRS, the negative log-likelihood ratio between a
//! per-cluster independent categorical model and the single-cluster model
//! (lower is better). [`ksigcat_run`] searches for a locally optimal
//! partition, [`empirical_pvalue`] tests it against count-preserving null
//! datasets, and [`estimate_k`] picks the number of clusters.

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod model_selection;
pub mod objective;
pub mod randomize;
pub mod rng;
pub mod search;
pub mod significance;

pub use baselines::{kmodes_run, KModesResult};
pub use dataset::{
    discretize_numeric, encode_labels, load_csv, load_labels, load_numeric_csv, Category, Dataset, LabelColumn,
    LoadOptions, Loaded, NumericTable,
};
pub use error::{Error, Result};
pub use harness::Algorithm;
pub use metrics::{acc, nmi, pairwise_f_measure};
pub use model_selection::{
    bic_select, bkplot_select, estimate_k, gap_profile, gap_star_select, EstimateConfig, EstimationReport, GapProfile,
    Selector, SrsCurve,
};
pub use objective::{entropy_relation, evaluate, expected_entropy, srs_full, srs_prime, ClusterCounts, Objective};
pub use randomize::{generate_group, randomize, randperm_dataset, swap_dataset, NullMethod, RandomizedGroup};
pub use rng::derive_seed;
pub use search::{entropy_search_run, ksigcat_run, local_search_step, Partition, SearchConfig, SearchState};
pub use significance::{empirical_pvalue, PValue};
