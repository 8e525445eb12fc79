//! End-to-end tests against the compiled binary: worked examples, exit
//! codes, artifact round-trips, and reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isoprof"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn isoprof")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "isoprof {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 stdout")
}

fn exit_code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

#[test]
fn walk_csv_matches_the_simple_lattice_row() {
    let text = run_ok(&[
        "walk", "--group", "zd:d=1", "--theta", "0", "--nmax", "5", "--out", "csv",
    ]);
    assert!(text.contains("# isoprof walk"));
    assert!(text.contains("# group=zd:d=1"));
    assert!(text.contains("n,p2n_num,p2n_den"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "n,p2n_num,p2n_den");
    assert_eq!(rows[1], "0,1,1");
    assert_eq!(rows[3], "2,3,8");
    assert_eq!(rows.len(), 7);
}

#[test]
fn folner_report_follows_the_schema() {
    let text = run_ok(&[
        "folner",
        "--group",
        "bs:m=2",
        "--family",
        "bs_windows",
        "--n",
        "2",
        "--report",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).expect("json report");
    assert_eq!(v["n"], 2);
    assert_eq!(v["measuredC"], "27/5");
    assert_eq!(v["neighborhoodOk"], true);
    assert_eq!(v["diameterOk"], true);
    assert!(v["sizeF"].is_number());
    assert!(v["sizeFp"].is_number());
    assert!(v["measuredK"].is_number());
    for key in ["p1", "p2", "pinf"] {
        assert!(
            v["testFunctionRatios"][key].is_number(),
            "missing ratio {key}"
        );
    }
}

#[test]
fn bad_inputs_exit_with_usage_code() {
    assert_eq!(exit_code(&["ball", "--group", "nosuch:d=1", "--radius", "2"]), 2);
    assert_eq!(
        exit_code(&["folner", "--group", "bs:m=2", "--n", "2", "--report", "json"]),
        2
    );
    assert_eq!(
        exit_code(&["walk", "--group", "zd:d=1", "--theta", "7/5", "--nmax", "3", "--out", "csv"]),
        2
    );
    // clap rejects unknown subcommands with the same code
    assert_eq!(exit_code(&["frobnicate"]), 2);
}

#[test]
fn exhausted_budget_exits_with_resource_code() {
    assert_eq!(
        exit_code(&["ball", "--group", "f2", "--radius", "12", "--budget-bytes", "1000"]),
        3
    );
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        run_ok(&[
            "growth",
            "--group",
            "lamplighter:p=2",
            "--radius",
            "6",
            "--out",
            "csv",
            "--output",
            path.to_str().unwrap(),
        ]);
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn flags_override_config_entries() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("exp.conf");
    std::fs::write(&conf, "group=zd:d=2\nradius=4\nout=csv\n# comment\n").unwrap();
    let from_file = run_ok(&["growth", "--config", conf.to_str().unwrap()]);
    assert!(from_file.contains("4,41"));
    let overridden = run_ok(&[
        "growth",
        "--config",
        conf.to_str().unwrap(),
        "--radius",
        "3",
    ]);
    assert!(overridden.contains("# radius=3"));
    assert!(overridden.contains("3,25"));
    assert!(!overridden.contains("4,41"));
}

#[test]
fn written_artifacts_reparse_for_fitting() {
    let dir = tempfile::tempdir().unwrap();
    let walk = dir.path().join("walk.csv");
    run_ok(&[
        "walk",
        "--group",
        "zd:d=1",
        "--theta",
        "1/2",
        "--nmax",
        "40",
        "--out",
        "csv",
        "--output",
        walk.to_str().unwrap(),
    ]);
    let text = run_ok(&[
        "walk",
        "fit",
        "--model",
        "poly",
        "--input",
        walk.to_str().unwrap(),
        "--n-min",
        "10",
        "--n-max",
        "40",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).expect("fit json");
    assert_eq!(v["group"], "zd:d=1");
    let alpha = v["param"].as_f64().unwrap();
    assert!((0.45..=0.55).contains(&alpha), "alpha = {alpha}");
    assert!(v["windows"].as_array().unwrap().len() >= 4);
}

#[test]
fn diagnostic_joins_profile_and_walk_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("profile.csv");
    let walk = dir.path().join("walk.csv");
    run_ok(&[
        "profile",
        "--group",
        "zd:d=1",
        "--p",
        "2",
        "--rmax",
        "12",
        "--method",
        "spectral",
        "--out",
        "csv",
        "--output",
        profile.to_str().unwrap(),
    ]);
    run_ok(&[
        "walk",
        "--group",
        "zd:d=1",
        "--theta",
        "1/2",
        "--nmax",
        "40",
        "--out",
        "csv",
        "--output",
        walk.to_str().unwrap(),
    ]);
    let text = run_ok(&[
        "walk",
        "diagnostic",
        "--profile",
        profile.to_str().unwrap(),
        "--input",
        walk.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).expect("diagnostic json");
    assert_eq!(v["groupMatch"], true);
    assert_eq!(v["profileClass"], "power");
    assert_eq!(v["decayClass"], "polynomial");
    assert_eq!(v["consistent"], true);
}

#[test]
fn compression_rows_carry_exact_witnesses() {
    let text = run_ok(&[
        "transfer",
        "compression",
        "--sub",
        "heis-center",
        "--amb",
        "heis",
        "--rmax",
        "4",
        "--out",
        "csv",
    ]);
    assert!(text.contains("t,rho,bound_kind,witness"));
    assert!(text.contains("\n1,4,exact,"));
    assert!(text.contains("\n4,8,exact,"));
}

#[test]
fn psi_trials_certify_every_generator() {
    let text = run_ok(&[
        "transfer", "psi", "--from", "bs:m=2", "--to", "zd:d=1", "--p", "2", "--trials", "10",
        "--radius", "3",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).expect("psi json");
    assert_eq!(v["allOk"], true);
    assert_eq!(v["isometryFailures"], 0);
    assert_eq!(v["contractionFailures"], 0);
    assert_eq!(v["generators"].as_array().unwrap().len(), 4);
}

#[test]
fn report_bundles_a_directory_and_lists_gaps() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "growth",
        "--group",
        "zd:d=1",
        "--radius",
        "5",
        "--out",
        "csv",
        "--output",
        dir.path().join("growth.csv").to_str().unwrap(),
    ]);
    run_ok(&[
        "walk",
        "--group",
        "zd:d=1",
        "--theta",
        "0",
        "--nmax",
        "6",
        "--out",
        "csv",
        "--output",
        dir.path().join("walk.csv").to_str().unwrap(),
    ]);
    std::fs::write(dir.path().join("junk.json"), "not json").unwrap();
    let md = run_ok(&["report", "--dir", dir.path().to_str().unwrap(), "--out", "md"]);
    assert!(md.contains("## zd:d=1"));
    assert!(md.contains("growth"));
    assert!(md.contains("missing: profile, folner"));
    assert!(md.contains("junk.json"));

    let json = run_ok(&["report", "--dir", dir.path().to_str().unwrap(), "--out", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).expect("report json");
    assert!(v["groups"]["zd:d=1"]["artifacts"].is_array());
    assert!(v["groups"]["zd:d=1"]["missing"]
        .as_array()
        .unwrap()
        .iter()
        .any(|m| m == "folner"));
    assert_eq!(v["unreadable"].as_array().unwrap().len(), 1);
}

#[test]
fn ball_cache_files_are_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path();
    let first = run_ok(&[
        "ball",
        "--group",
        "heis",
        "--radius",
        "4",
        "--cache-dir",
        cache.to_str().unwrap(),
    ]);
    assert!(first.contains("elements=135"));
    assert!(Path::new(cache).join("heis-r4.ball").is_file());
    let second = run_ok(&[
        "ball",
        "--group",
        "heis",
        "--radius",
        "4",
        "--cache-dir",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(first, second);
}

#[test]
fn profile_envelope_fit_is_recorded_in_the_header() {
    let text = run_ok(&[
        "profile",
        "--group",
        "zd:d=2",
        "--p",
        "1",
        "--rmax",
        "6",
        "--method",
        "candidates",
        "--phi",
        "power(0.5)",
        "--out",
        "csv",
    ]);
    assert!(text.contains("# phi=power(0.5)"));
    assert!(text.contains("# result-sobolev-c="));
    assert!(text.contains("# result-sobolev-c-prime="));
}
