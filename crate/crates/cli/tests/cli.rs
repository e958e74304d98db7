use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const G5: &str = "a\tb\na\tc\nb\ta\nc\ta\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirparadox"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn g5_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g5.tsv"), G5).unwrap();
    std::fs::write(dir.path().join("a.tsv"), "a metoo\n").unwrap();
    dir
}

#[test]
fn stats_emits_degree_summary() {
    let dir = g5_dir();
    let json: Value = serde_json::from_str(&stdout(&run(dir.path(), &["stats", "--edges", "g5.tsv"]))).unwrap();
    assert_eq!(json["n"], 3);
    assert_eq!(json["m"], 4);
    assert!((json["var_out"].as_f64().unwrap() - 2.0 / 9.0).abs() < 1e-15);
}

#[test]
fn bias_row_on_g5() {
    let dir = g5_dir();
    let csv = stdout(&run(
        dir.path(),
        &["bias", "--edges", "g5.tsv", "--attrs", "a.tsv", "--format", "csv"],
    ));
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("attribute"), "metoo");
    assert_eq!(col("b_global"), "0.166666667");
    assert_eq!(col("b_local"), "0.333333333");
}

#[test]
fn poll_is_byte_identical_across_runs() {
    let dir = g5_dir();
    let args = [
        "poll", "--edges", "g5.tsv", "--attrs", "a.tsv", "--method", "fpp", "--budget", "25", "--trials", "100000",
        "--attr", "metoo", "--seed", "7",
    ];
    let first = run(dir.path(), &args);
    let second = run(dir.path(), &args);
    assert_eq!(stdout(&first), stdout(&second));
    let json: Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(json["meta"]["seed"], 7);
    assert_eq!(json["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert!((json["exact"]["bias"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn seed_changes_the_hash_and_estimate() {
    let dir = g5_dir();
    let poll = |seed: &str| {
        let out = run(
            dir.path(),
            &[
                "poll", "--edges", "g5.tsv", "--attrs", "a.tsv", "--method", "ip", "--budget", "3", "--trials", "100",
                "--attr", "metoo", "--seed", seed,
            ],
        );
        serde_json::from_str::<Value>(&stdout(&out)).unwrap()
    };
    let (a, b) = (poll("1"), poll("2"));
    assert_ne!(a["meta"]["config_hash"], b["meta"]["config_hash"]);
    assert_ne!(a["evaluation"]["mean_estimate"], b["evaluation"]["mean_estimate"]);
}

#[test]
fn out_flag_writes_file_and_prints_summary() {
    let dir = g5_dir();
    let out = run(
        dir.path(),
        &["paradox", "--edges", "g5.tsv", "--format", "csv", "--out", "gaps.csv"],
    );
    let summary = stdout(&out);
    assert!(summary.contains("mean degree"));
    let csv = std::fs::read_to_string(dir.path().join("gaps.csv")).unwrap();
    assert!(csv.starts_with("gap,closed_form,direct,neighbour_mean\nout_friend,0.166666667,"));
}

#[test]
fn exit_codes() {
    let dir = g5_dir();
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["stats"]).status.code(), Some(1));
    std::fs::write(dir.path().join("bad.tsv"), "a b\nc\n").unwrap();
    let bad = run(dir.path(), &["stats", "--edges", "bad.tsv"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("graph::load_edge_list: line 2"));
    assert_eq!(
        run(
            dir.path(),
            &["bias", "--edges", "g5.tsv", "--attrs", "a.tsv", "--attr", "nope"]
        )
        .status
        .code(),
        Some(2)
    );
    let stuck = run(
        dir.path(),
        &[
            "spectral",
            "--edges",
            "g5.tsv",
            "--attrs",
            "a.tsv",
            "--max-iters",
            "1",
            "--tol",
            "0",
        ],
    );
    assert_eq!(stuck.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&stuck.stderr).starts_with("spectral::lambda2"));
}

#[test]
fn unknown_attribute_member_is_an_error_unless_skipped() {
    let dir = g5_dir();
    std::fs::write(dir.path().join("x.tsv"), "zed metoo\na metoo\n").unwrap();
    let strict = run(dir.path(), &["bias", "--edges", "g5.tsv", "--attrs", "x.tsv"]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("zed"));
    let lax = run(
        dir.path(),
        &["bias", "--edges", "g5.tsv", "--attrs", "x.tsv", "--skip-unknown"],
    );
    assert!(lax.status.success());
}

#[test]
fn spectral_reports_g5_anchor() {
    let dir = g5_dir();
    let json: Value = serde_json::from_str(&stdout(&run(
        dir.path(),
        &["spectral", "--edges", "g5.tsv", "--attrs", "a.tsv"],
    )))
    .unwrap();
    let s = &json["results"][0];
    assert!((s["exact_variance"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((s["upper_bound"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(s["bd_connected"], false);
    assert_eq!(s["bd_nonbipartite"], true);
}

#[test]
fn curve_and_rank_csv() {
    let dir = g5_dir();
    let curve = stdout(&run(dir.path(), &["curve", "--edges", "g5.tsv", "--format", "csv"]));
    assert!(curve.starts_with("variant,bin_lo,bin_hi,n_nodes,fraction\n"));
    let rank = stdout(&run(
        dir.path(),
        &[
            "rank", "--edges", "g5.tsv", "--attrs", "a.tsv", "--out", "r.csv", "--format", "csv",
        ],
    ));
    assert!(rank.contains("#metoo: perceived 66.7%, actual 33.3%"));
}

#[test]
fn bias_histograms() {
    let dir = g5_dir();
    let csv = stdout(&run(
        dir.path(),
        &[
            "bias",
            "--edges",
            "g5.tsv",
            "--attrs",
            "a.tsv",
            "--histogram",
            "individual",
            "--attr",
            "metoo",
            "--bins",
            "2",
            "--format",
            "csv",
        ],
    ));
    // individual biases are -1/3, 2/3, 2/3
    assert_eq!(
        csv,
        "bin_lo,bin_hi,count\n-0.333333333,0.166666667,1\n0.166666667,0.666666667,2\n"
    );
    let needs_attr = run(
        dir.path(),
        &[
            "bias",
            "--edges",
            "g5.tsv",
            "--attrs",
            "a.tsv",
            "--histogram",
            "individual",
        ],
    );
    assert_eq!(needs_attr.status.code(), Some(1));
}

#[test]
fn synth_then_core_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let synth = run(
        d,
        &[
            "synth",
            "--nodes",
            "400",
            "--n-attrs",
            "5",
            "--edges-out",
            "g.tsv",
            "--attrs-out",
            "a.tsv",
            "--seed",
            "4",
            "--format",
            "csv",
        ],
    );
    let csv = stdout(&synth);
    assert!(csv.starts_with("# seed=4\n"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("attr00")).count(), 5);

    let report: Value = serde_json::from_str(&stdout(&run(
        d,
        &["core", "--edges", "g.tsv", "--edges-out", "core.tsv"],
    )))
    .unwrap();
    assert_eq!(report["empty"], false);
    let core_stats: Value = serde_json::from_str(&stdout(&run(d, &["stats", "--edges", "core.tsv"]))).unwrap();
    assert_eq!(core_stats["n"], report["nodes"]);

    let compare = stdout(&run(
        d,
        &[
            "compare",
            "--edges",
            "g.tsv",
            "--attrs",
            "a.tsv",
            "--budgets",
            "5,10",
            "--trials",
            "200",
            "--format",
            "csv",
        ],
    ));
    let rows: Vec<&str> = compare.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "budget,method_pair,win_fraction,n_attrs");
    assert_eq!(rows.len(), 5);
}

#[test]
fn core_of_a_star_is_empty_and_flagged() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("star.tsv"), "0 1\n0 2\n").unwrap();
    let out = run(
        dir.path(),
        &["core", "--edges", "star.tsv", "--edges-out", "c.tsv", "--out", "r.json"],
    );
    assert!(stdout(&out).contains("core is empty"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["empty"], true);
    assert_eq!(std::fs::read_to_string(dir.path().join("c.tsv")).unwrap(), "");
}
