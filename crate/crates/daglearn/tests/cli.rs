//! End-to-end runs of the compiled binary.

mod common;

use common::{chain_net, daglearn_cmd, fixture};
use daglearn::{
    ancestral_sample, canonical_states, joint_from_bayesnet, read_model, write_dataset_csv,
    write_distribution, DistributionDocument,
};
use std::fs;
use std::fs::File;
use std::process::Output;

fn run(args: &[&str]) -> Output {
    daglearn_cmd().args(args).output().expect("binary runs")
}

fn path(p: &std::path::Path) -> String {
    p.to_str().unwrap().to_owned()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["learn", "--help"]).status.code(), Some(0));
}

#[test]
fn chi2_without_alpha_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "learn",
        "--data",
        &path(&fixture("copy.csv")),
        "--order",
        "file-order",
        "--method",
        "chi2",
        "--out",
        &path(&dir.path().join("m.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--alpha"));
}

#[test]
fn verify_exits_zero_on_the_shipped_fixtures() {
    let data_checks: &[(&str, &[&str])] = &[
        ("copy.csv", &["--method", "ci-epsilon", "--epsilon", "0.1"]),
        ("chain.csv", &["--method", "chi2", "--alpha", "0.05"]),
        ("chain.csv", &["--method", "aic"]),
        ("chain.csv", &["--method", "bayes"]),
    ];
    for (name, extra) in data_checks {
        let mut args = vec!["verify", "--data"];
        let data = path(&fixture(name));
        args.push(&data);
        args.extend_from_slice(&["--order", "file-order"]);
        args.extend_from_slice(extra);
        let out = run(&args);
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert_eq!(out.status.code(), Some(0), "{name} {extra:?}: {stdout}");
        assert!(stdout.contains("verify: PASS"));
    }

    let out = run(&[
        "verify",
        "--dist",
        &path(&fixture("chain_dist.json")),
        "--order",
        "file-order",
        "--method",
        "ci-epsilon",
        "--epsilon",
        "1e-9",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn score_bde_prints_the_pinned_copy_value() {
    let dir = tempfile::tempdir().unwrap();
    let model = path(&dir.path().join("model.json"));
    let learn = run(&[
        "learn",
        "--data",
        &path(&fixture("copy.csv")),
        "--order",
        "file-order",
        "--method",
        "ci-epsilon",
        "--epsilon",
        "0.1",
        "--out",
        &model,
    ]);
    assert_eq!(learn.status.code(), Some(0));

    let out = run(&[
        "score",
        "--data",
        &path(&fixture("copy.csv")),
        "--model",
        &model,
        "--score",
        "bde",
        "--prior-alpha",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let printed: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    // two counts of each child state at node 0 and a deterministic copy at
    // node 1 give Polya weights 1/30 and 1/9
    let expected = (1.0f64 / 270.0).ln();
    assert!(
        (printed - expected).abs() < 1e-12,
        "printed {printed}, expected {expected}"
    );
}

#[test]
fn recover_returns_the_chain_model() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("model.json");
    let out = run(&[
        "recover",
        "--dist",
        &path(&fixture("chain_dist.json")),
        "--order",
        "file-order",
        "--epsilon",
        "1e-9",
        "--out",
        &path(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let net = read_model(File::open(&out_path).unwrap())
        .unwrap()
        .to_network()
        .unwrap();
    assert_eq!(net.dag().parent_sets(), &[vec![], vec![0], vec![1]]);
}

#[test]
fn shipped_fixtures_match_regeneration() {
    let net = chain_net();
    let states = canonical_states(net.variables());

    let rows = ancestral_sample(&net, 2000, 7).unwrap();
    let mut csv_bytes = Vec::new();
    write_dataset_csv(&rows, &states, &mut csv_bytes).unwrap();
    assert_eq!(fs::read(fixture("chain.csv")).unwrap(), csv_bytes);

    let joint = joint_from_bayesnet(&net).unwrap();
    let doc = DistributionDocument::from_joint(&joint, &states).unwrap();
    let mut json_bytes = Vec::new();
    write_distribution(&doc, &mut json_bytes).unwrap();
    assert_eq!(fs::read(fixture("chain_dist.json")).unwrap(), json_bytes);
}
