use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sigcat"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn sigcat")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("JSON line"))
        .collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cluster_writes_one_label_per_object() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("labels.txt");
    let zoo = data("zoo.csv");
    let out = run(&[
        "cluster", "--input", path_str(&zoo), "--label-column", "last", "--k", "7", "--seed", "3", "--output",
        path_str(&out_path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let labels = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(labels.lines().count(), 101);
    assert!(labels.lines().all(|l| l.parse::<usize>().unwrap() < 7));
    let rec = &records(&out)[0];
    assert!(rec["srs"].as_f64().unwrap() > 0.0);
    assert_eq!(rec["seed"], 3);
    assert!(rec["scores"]["acc"].as_f64().is_some());
}

#[test]
fn same_flags_give_identical_labels() {
    let dir = tempfile::tempdir().unwrap();
    let zoo = data("zoo.csv");
    let mut files = Vec::new();
    for (i, alg) in ["ksigcat", "ksigcat", "kmodes", "kmodes", "entropy", "entropy"].iter().enumerate() {
        let p = dir.path().join(format!("{i}.txt"));
        let out = run(&[
            "cluster", "--input", path_str(&zoo), "--label-column", "last", "--k", "7", "--seed", "42", "--algorithm",
            alg, "--output", path_str(&p),
        ]);
        assert!(out.status.success());
        files.push(std::fs::read(&p).unwrap());
    }
    for pair in files.chunks(2) {
        assert_eq!(pair[0], pair[1]);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let zoo = data("zoo.csv");
    let zoo = path_str(&zoo);
    let cases: Vec<Vec<&str>> = vec![
        vec!["cluster", "--input", zoo, "--k", "0", "--output", "/dev/null"],
        vec!["cluster", "--input", zoo, "--k", "500", "--output", "/dev/null"],
        vec!["pvalue", "--input", zoo, "--k", "3", "--r", "0"],
        vec!["estimate-k", "--input", zoo, "--kmax", "1"],
        vec!["estimate-k", "--input", zoo, "--kmax", "3", "--method", "bkplot"],
        vec!["cluster", "--input", zoo, "--k", "3", "--algorithm", "dbscan", "--output", "/dev/null"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn io_failures_exit_with_one() {
    let out = run(&["cluster", "--input", "/nonexistent/x.csv", "--k", "2", "--output", "/dev/null"]);
    assert_eq!(out.status.code(), Some(1));
    let zoo = data("zoo.csv");
    let out = run(&["cluster", "--input", path_str(&zoo), "--k", "2", "--output", "/nonexistent/dir/out.txt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_on_identical_files_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.txt");
    std::fs::write(&p, "0\n0\n1\n2\n2\n").unwrap();
    let out = run(&["eval", "--predicted", path_str(&p), "--truth", path_str(&p)]);
    assert!(out.status.success());
    let rec = &records(&out)[0];
    assert_eq!(rec["acc"], 1.0);
    assert!((rec["nmi"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn pvalue_reports_null_summary_and_ignores_thread_count() {
    let zoo = data("zoo.csv");
    let args = |threads: &'static str| {
        vec![
            "--threads".to_owned(),
            threads.to_owned(),
            "pvalue".to_owned(),
            "--input".to_owned(),
            path_str(&zoo).to_owned(),
            "--label-column".to_owned(),
            "last".to_owned(),
            "--k".to_owned(),
            "7".to_owned(),
            "--r".to_owned(),
            "30".to_owned(),
            "--seed".to_owned(),
            "5".to_owned(),
        ]
    };
    let one = bin().args(args("1")).output().unwrap();
    let four = bin().args(args("4")).output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let rec = &records(&one)[0];
    assert_eq!(rec["null_srs_summary"]["count"], 30);
    assert!(rec["p_value"].as_f64().unwrap() <= 0.05);
}

#[test]
fn estimate_k_emits_a_report() {
    let hr = data("hayes-roth.csv");
    let out = run(&[
        "estimate-k", "--input", path_str(&hr), "--label-column", "last", "--kmax", "6", "--r", "5", "--method", "all",
        "--seed", "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec = &records(&out)[0];
    let report = &rec["report"];
    assert_eq!(report["records"].as_array().unwrap().len(), 6);
    for key in ["gap_star_k", "bic_k", "bkplot_k"] {
        let k = report["selected"][key].as_u64().unwrap();
        assert!((2..=6).contains(&k), "{key}={k}");
    }
}

#[test]
fn discretized_iris_clusters_well() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("iris_cat.csv");
    let iris = data("iris.csv");
    let out = run(&[
        "discretize", "--input", path_str(&iris), "--label-column", "last", "--k", "3", "--seed", "1", "--output",
        path_str(&cat),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&[
        "benchmark", "--dataset", &format!("{}:3", path_str(&cat)), "--runs", "50", "--seed", "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mean_acc = records(&out)[0]["mean_acc"].as_f64().unwrap();
    assert!((mean_acc - 0.926).abs() < 0.1, "mean ACC {mean_acc}");
}

#[test]
fn benchmark_covers_each_algorithm() {
    let zoo = data("zoo.csv");
    let out = run(&[
        "benchmark", "--dataset", path_str(&zoo), "--algorithm", "ksigcat", "--algorithm", "kmodes", "--runs", "5",
    ]);
    assert!(out.status.success());
    let recs = records(&out);
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["k"], 7);
    assert_eq!(recs[1]["algorithm"], "kmodes");
}
