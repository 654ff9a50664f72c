//! `sigcat` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sigcat_core::{Error, LabelColumn, LoadOptions};

#[derive(Debug, Parser)]
#[command(name = "sigcat", version, about = "Significance-based clustering of categorical data")]
struct Cli {
    /// Worker threads for null-group and sweep evaluations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Log level for diagnostics on stderr.
    #[arg(long, global = true, default_value = "warn")]
    log_level: log::LevelFilter,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster a dataset and write one label per line.
    Cluster(ClusterArgs),
    /// Empirical p-value of the clustering against null datasets.
    Pvalue(PvalueArgs),
    /// Estimate the number of clusters.
    EstimateK(EstimateArgs),
    /// ACC, NMI and pairwise F-measure between two label files.
    Eval(EvalArgs),
    /// Turn numeric attributes into categories with per-attribute 1-D k-means.
    Discretize(DiscretizeArgs),
    /// Repeated runs per dataset and algorithm with mean ACC/NMI/runtime.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Clone, Args)]
struct InputArgs {
    /// Input CSV file.
    #[arg(long)]
    input: PathBuf,
    /// Field delimiter.
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// Treat the first row as a header.
    #[arg(long)]
    header: bool,
    /// Column holding ground-truth labels: a 0-based index or `last`.
    #[arg(long, value_parser = parse_label_column)]
    label_column: Option<LabelColumn>,
    /// Token marking a missing value (becomes its own category).
    #[arg(long, default_value = "?")]
    missing: String,
    /// Ground-truth labels, one per line, as an alternative to --label-column.
    #[arg(long, conflicts_with = "label_column")]
    labels: Option<PathBuf>,
}

impl InputArgs {
    fn load_options(&self) -> Result<LoadOptions, Error> {
        if !self.delimiter.is_ascii() {
            return Err(Error::InvalidArgument(format!("delimiter {:?} is not ASCII", self.delimiter)));
        }
        Ok(LoadOptions {
            delimiter: self.delimiter as u8,
            has_header: self.header,
            label_column: self.label_column,
            missing_token: self.missing.clone(),
        })
    }
}

fn parse_label_column(s: &str) -> Result<LabelColumn, String> {
    if s == "last" {
        return Ok(LabelColumn::Last);
    }
    s.parse::<usize>()
        .map(LabelColumn::Index)
        .map_err(|_| format!("expected a column index or `last`, got {s:?}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Srs,
    Ee,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Ksigcat,
    Kmodes,
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NullArg {
    Swap,
    Randperm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SelectorArg {
    Gapstar,
    Bic,
    Bkplot,
    All,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "srs")]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value = "ksigcat")]
    algorithm: AlgorithmArg,
    /// Where to write the labels (one integer per line).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct PvalueArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Number of null datasets.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    r: u64,
    #[arg(long, value_enum, default_value = "swap")]
    method: NullArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent p-values, each with its own observed run and null group.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    repetitions: u64,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    kmax: u64,
    /// Null datasets per k (used by gapstar).
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    r: u64,
    #[arg(long, value_enum, default_value = "gapstar")]
    method: SelectorArg,
    /// Null generator for gapstar.
    #[arg(long, value_enum, default_value = "swap")]
    null: NullArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    repetitions: u64,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Predicted labels, one per line.
    #[arg(long)]
    predicted: PathBuf,
    /// Ground-truth labels, one per line.
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Debug, Args)]
struct DiscretizeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Categories per attribute.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    k: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Categorical CSV to write (labels appended as the last column when present).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Dataset as `PATH` or `PATH:K`; K defaults to the number of distinct labels.
    #[arg(long = "dataset", required = true)]
    datasets: Vec<String>,
    /// Column holding ground-truth labels in every dataset.
    #[arg(long, value_parser = parse_label_column, default_value = "last")]
    label_column: LabelColumn,
    #[arg(long, default_value = ",")]
    delimiter: char,
    #[arg(long, default_value = "?")]
    missing: String,
    #[arg(long = "algorithm", value_enum, default_value = "ksigcat")]
    algorithms: Vec<AlgorithmArg>,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidClusterCount { .. } | Error::InvalidArgument(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().filter_level(cli.log_level).init();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Cluster(args) => commands::cluster(args),
        Command::Pvalue(args) => commands::pvalue(args),
        Command::EstimateK(args) => commands::estimate_k(args),
        Command::Eval(args) => commands::eval(args),
        Command::Discretize(args) => commands::discretize(args),
        Command::Benchmark(args) => commands::benchmark(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
