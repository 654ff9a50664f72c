use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use sigcat_core::harness::{self, median, mode, Algorithm};
use sigcat_core::model_selection::Selector;
use sigcat_core::{
    acc, discretize_numeric, encode_labels, estimate_k as estimate, load_csv, load_labels, load_numeric_csv, nmi,
    pairwise_f_measure, Error, EstimateConfig, LoadOptions, Loaded, NullMethod, Result, SearchConfig,
};

use crate::{
    AlgorithmArg, BenchmarkArgs, ClusterArgs, DiscretizeArgs, EstimateArgs, EvalArgs, InputArgs, NullArg, ObjectiveArg,
    PvalueArgs, SelectorArg,
};

fn emit(record: &impl Serialize) -> Result<()> {
    let line = serde_json::to_string(record).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}")?;
    Ok(())
}

fn load(input: &InputArgs) -> Result<(Loaded, Option<Vec<usize>>)> {
    let loaded = load_csv(&input.input, &input.load_options()?)?;
    let truth = match &input.labels {
        Some(path) => {
            let labels = load_labels(path)?;
            if labels.len() != loaded.dataset.n_objects() {
                return Err(Error::LengthMismatch {
                    expected: loaded.dataset.n_objects(),
                    got: labels.len(),
                });
            }
            Some(encode_labels(&labels).0)
        }
        None => loaded.label_indices(),
    };
    Ok((loaded, truth))
}

fn usize_arg(v: u64) -> usize {
    usize::try_from(v).unwrap_or(usize::MAX)
}

impl From<NullArg> for NullMethod {
    fn from(arg: NullArg) -> Self {
        match arg {
            NullArg::Swap => NullMethod::Swap,
            NullArg::Randperm => NullMethod::Randperm,
        }
    }
}

impl From<AlgorithmArg> for Algorithm {
    fn from(arg: AlgorithmArg) -> Self {
        match arg {
            AlgorithmArg::Ksigcat => Algorithm::Ksigcat,
            AlgorithmArg::Kmodes => Algorithm::Kmodes,
            AlgorithmArg::Entropy => Algorithm::Entropy,
        }
    }
}

fn write_labels(path: &Path, assignments: &[usize]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for a in assignments {
        writeln!(out, "{a}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn cluster(args: &ClusterArgs) -> Result<()> {
    let (loaded, truth) = load(&args.input)?;
    let ds = &loaded.dataset;
    let k = usize_arg(args.k);
    let algorithm = match (args.algorithm, args.objective) {
        (AlgorithmArg::Ksigcat, ObjectiveArg::Ee) | (AlgorithmArg::Entropy, _) => Algorithm::Entropy,
        (AlgorithmArg::Ksigcat, ObjectiveArg::Srs) => Algorithm::Ksigcat,
        (AlgorithmArg::Kmodes, _) => Algorithm::Kmodes,
    };
    let start = Instant::now();
    let partition = harness::run_algorithm(ds, algorithm, k, args.seed)?;
    let runtime_secs = start.elapsed().as_secs_f64();
    write_labels(&args.output, &partition.assignments)?;
    let scores = match &truth {
        Some(t) => Some(json!({
            "acc": acc(&partition.assignments, t)?,
            "nmi": nmi(&partition.assignments, t)?,
        })),
        None => None,
    };
    emit(&json!({
        "command": "cluster",
        "algorithm": algorithm,
        "k": k,
        "seed": args.seed,
        "n_objects": ds.n_objects(),
        "srs": partition.objective_value,
        "cluster_sizes": partition.cluster_sizes(),
        "runtime_secs": runtime_secs,
        "scores": scores,
        "output": args.output,
    }))
}

#[derive(Serialize)]
struct NullSummary {
    count: usize,
    min: f64,
    median: f64,
    mean: f64,
    max: f64,
}

fn summarize(values: &[f64]) -> NullSummary {
    NullSummary {
        count: values.len(),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        median: median(values).unwrap_or(f64::NAN),
        mean: values.iter().sum::<f64>() / values.len() as f64,
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

pub fn pvalue(args: &PvalueArgs) -> Result<()> {
    let (loaded, _) = load(&args.input)?;
    let method: NullMethod = args.method.into();
    let pvalues = harness::pvalue_repetitions(
        &loaded.dataset,
        usize_arg(args.k),
        usize_arg(args.r),
        method,
        usize_arg(args.repetitions),
        args.seed,
    )?;
    for (i, p) in pvalues.iter().enumerate() {
        emit(&json!({
            "command": "pvalue",
            "repetition": i,
            "k": args.k,
            "r": args.r,
            "method": method,
            "srs": p.observed,
            "p_value": p.p_value,
            "p_value_plus_one": p.p_value_plus_one,
            "null_srs_summary": summarize(&p.null_srs),
        }))?;
    }
    if pvalues.len() > 1 {
        let ps: Vec<f64> = pvalues.iter().map(|p| p.p_value).collect();
        emit(&json!({
            "command": "pvalue",
            "summary": true,
            "repetitions": ps.len(),
            "median_p_value": median(&ps),
            "fraction_significant": ps.iter().filter(|&&p| p <= 0.05).count() as f64 / ps.len() as f64,
        }))?;
    }
    Ok(())
}

pub fn estimate_k(args: &EstimateArgs) -> Result<()> {
    let (loaded, _) = load(&args.input)?;
    let k_max = usize_arg(args.kmax);
    if k_max > loaded.dataset.n_objects() {
        return Err(Error::InvalidClusterCount {
            k: k_max,
            n: loaded.dataset.n_objects(),
        });
    }
    let mut config = EstimateConfig::new(k_max, args.seed);
    config.group_size = usize_arg(args.r);
    config.method = args.null.into();
    config.search = SearchConfig::new(2, args.seed);
    config.selectors = match args.method {
        SelectorArg::Gapstar => vec![Selector::GapStar],
        SelectorArg::Bic => vec![Selector::Bic],
        SelectorArg::Bkplot => vec![Selector::Bkplot],
        SelectorArg::All => vec![Selector::GapStar, Selector::Bic, Selector::Bkplot],
    };
    if config.selectors.contains(&Selector::Bkplot) && k_max < 4 {
        return Err(Error::InvalidArgument(format!("bkplot needs --kmax >= 4, got {k_max}")));
    }
    let reports = if args.repetitions == 1 {
        vec![estimate(&loaded.dataset, &config)?]
    } else {
        harness::estimate_repetitions(&loaded.dataset, &config, usize_arg(args.repetitions))?
    };
    for (i, report) in reports.iter().enumerate() {
        emit(&json!({ "command": "estimate-k", "repetition": i, "report": report }))?;
    }
    if reports.len() > 1 {
        let pick = |f: fn(&sigcat_core::EstimationReport) -> Option<usize>| {
            let ks: Vec<usize> = reports.iter().filter_map(f).collect();
            mode(&ks)
        };
        emit(&json!({
            "command": "estimate-k",
            "summary": true,
            "repetitions": reports.len(),
            "gap_star_mode": pick(|r| r.selected.gap_star_k),
            "bic_mode": pick(|r| r.selected.bic_k),
            "bkplot_mode": pick(|r| r.selected.bkplot_k),
        }))?;
    }
    Ok(())
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let predicted = load_labels(&args.predicted)?;
    let truth = load_labels(&args.truth)?;
    emit(&json!({
        "command": "eval",
        "n_objects": truth.len(),
        "acc": acc(&predicted, &truth)?,
        "nmi": nmi(&predicted, &truth)?,
        "f_measure": pairwise_f_measure(&predicted, &truth)?,
    }))
}

pub fn discretize(args: &DiscretizeArgs) -> Result<()> {
    let options = args.input.load_options()?;
    let table = load_numeric_csv(&args.input.input, &options)?;
    let ds = discretize_numeric(&table.columns, usize_arg(args.k), args.seed)?;
    let labels = match &args.input.labels {
        Some(path) => Some(load_labels(path)?),
        None => table.labels,
    };
    let mut writer = csv::WriterBuilder::new()
        .delimiter(options.delimiter)
        .from_path(&args.output)?;
    for i in 0..ds.n_objects() {
        let mut record: Vec<&str> = (0..ds.n_attributes()).map(|m| ds.decode(i, m)).collect();
        if let Some(l) = &labels {
            record.push(&l[i]);
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    emit(&json!({
        "command": "discretize",
        "n_objects": ds.n_objects(),
        "n_attributes": ds.n_attributes(),
        "categories_per_attribute": ds.categories_per_attribute(),
        "output": args.output,
    }))
}

fn parse_dataset_spec(spec: &str) -> (&str, Option<usize>) {
    match spec.rsplit_once(':') {
        Some((path, k)) => match k.parse() {
            Ok(k) => (path, Some(k)),
            Err(_) => (spec, None),
        },
        None => (spec, None),
    }
}

pub fn benchmark(args: &BenchmarkArgs) -> Result<()> {
    if !args.delimiter.is_ascii() {
        return Err(Error::InvalidArgument(format!("delimiter {:?} is not ASCII", args.delimiter)));
    }
    let options = LoadOptions {
        delimiter: args.delimiter as u8,
        has_header: false,
        label_column: Some(args.label_column),
        missing_token: args.missing.clone(),
    };
    for spec in &args.datasets {
        let (path, k) = parse_dataset_spec(spec);
        let loaded = load_csv(path, &options)?;
        let labels = loaded.labels.as_deref().unwrap_or_default();
        let (truth, classes) = encode_labels(labels);
        let k = k.unwrap_or(classes.len());
        for &alg in &args.algorithms {
            let summary = harness::repeated_runs(&loaded.dataset, &truth, alg.into(), k, usize_arg(args.runs), args.seed)?;
            emit(&json!({
                "command": "benchmark",
                "dataset": path,
                "algorithm": summary.algorithm,
                "k": k,
                "runs": summary.runs.len(),
                "mean_acc": summary.mean_acc,
                "mean_nmi": summary.mean_nmi,
                "mean_f_measure": summary.mean_f_measure,
                "mean_srs": summary.mean_srs,
                "mean_runtime_secs": summary.mean_runtime_secs,
            }))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_spec_parsing() {
        assert_eq!(parse_dataset_spec("data/zoo.csv:7"), ("data/zoo.csv", Some(7)));
        assert_eq!(parse_dataset_spec("data/zoo.csv"), ("data/zoo.csv", None));
        assert_eq!(parse_dataset_spec("C:dir/x.csv"), ("C:dir/x.csv", None));
    }
}
