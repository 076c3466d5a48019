//! End-to-end checks of the `escapes` binary: exit codes, error JSON on
//! stderr, output files, and byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_escapes"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("exp.json");
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json_file(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn stderr_error(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is one JSON object")
}

const FULL2: &str = r#""subshift": {"alphabet_size": 2, "transition": [[1,1],[1,1]]}"#;

fn cantor_escape_config(n_max: usize, lo: usize, hi: usize) -> String {
    format!(
        r#"{{
            "system": {{"map": "cantor"}},
            "potential": {{"constant": -0.6931471805599453}},
            "hole": {{"center": {{"point": "1/4"}},
                      "family": {{"single_cylinder": {{"n_max": {n_max}}}}}}},
            "run": [{{"command": "escape", "n_range": [{lo}, {hi}]}},
                    {{"command": "dimension", "n_range": [{lo}, {hi}]}}]
        }}"#
    )
}

#[test]
fn pressure_is_zero_for_the_normalized_cantor_potential() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), &cantor_escape_config(6, 2, 6));
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "pressure",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("lambda = "));
    assert!(stdout.contains("pressure = "));

    let summary = json_file(&out_dir.join("pressure.json"));
    assert!(summary["pressure"]["pressure"].as_f64().unwrap().abs() <= 1e-12);
    // Provenance envelope: config hash, version, and the numeric budgets.
    assert_eq!(summary["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(summary["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(summary["params"]["power_tol"], 1e-12);
}

#[test]
fn pressure_matches_the_golden_mean_closed_form() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        r#"{
            "system": {"subshift": {"alphabet_size": 2, "transition": [[1,1],[1,0]]}},
            "potential": {"constant": 0.0}
        }"#,
    );
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "pressure",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let summary = json_file(&out_dir.join("pressure.json"));
    let p = summary["pressure"]["pressure"].as_f64().unwrap();
    let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    assert!((p - golden).abs() <= 1e-9, "pressure {p} vs {golden}");
}

#[test]
fn escape_summary_predicts_three_quarters_on_the_cantor_instance() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), &cantor_escape_config(8, 2, 8));
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "escape",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let summary = json_file(&out_dir.join("escape.json"));
    assert_eq!(summary["sweep"]["predicted"], 0.75);
    assert!((summary["sweep"]["final_ratio"].as_f64().unwrap() - 0.75).abs() < 0.05);

    let csv = fs::read_to_string(out_dir.join("escape.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,len_n,mu_hole,lambda_n,escape_rate,ratio,gap_ratio,predicted,deviation,mixing_flag"
    );
    assert_eq!(lines.count(), 7);
}

#[test]
fn escape_summary_predicts_one_for_a_champernowne_center() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        &format!(
            r#"{{
                "system": {{{FULL2}}},
                "potential": {{"constant": -0.6931471805599453}},
                "hole": {{"center": {{"champernowne": 8}},
                          "family": {{"single_cylinder": {{"n_max": 8}}}}}},
                "run": [{{"command": "escape", "n_range": [2, 8]}}]
            }}"#
        ),
    );
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "escape",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let summary = json_file(&out_dir.join("escape.json"));
    assert_eq!(summary["sweep"]["predicted"], 1.0);
}

#[test]
fn dimension_predicts_the_cantor_limit() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), &cantor_escape_config(6, 2, 6));
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "dimension",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let summary = json_file(&out_dir.join("dimension.json"));
    let predicted = summary["sweep"]["predicted"].as_f64().unwrap();
    assert!((predicted - 3.0 / (4.0 * 3f64.ln())).abs() <= 1e-9);
    assert!(out_dir.join("dimension.csv").exists());
}

#[test]
fn dimension_reports_the_closed_repeller_without_a_hole() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        r#"{"system": {"map": "doubling"}, "potential": {"constant": 0.0}}"#,
    );
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "dimension",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let summary = json_file(&out_dir.join("dimension.json"));
    let s = summary["closed"]["t"].as_f64().unwrap();
    assert!((s - 1.0).abs() <= 1e-9, "closed dimension {s}");
}

#[test]
fn empty_sweep_ranges_are_config_errors() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), &cantor_escape_config(6, 5, 2));
    let out = run(&["escape", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let err = stderr_error(&out);
    assert_eq!(err["exit_code"], 2);
    assert!(err["error"].as_str().unwrap().contains("sweep range"));
}

#[test]
fn malformed_transition_matrices_are_config_errors() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        r#"{
            "system": {"subshift": {"alphabet_size": 2, "transition": [[1,1],[1]]}},
            "potential": {"constant": 0.0}
        }"#,
    );
    let out = run(&["pressure", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert_eq!(stderr_error(&out)["exit_code"], 2);
}

#[test]
fn non_expanding_maps_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        r#"{
            "system": {"map": {"branches": [
                {"interval": [0.0, 0.5], "kind": "linear", "slope": 1.0, "offset": 0.0},
                {"interval": [0.5, 1.0], "kind": "linear", "slope": 2.0, "offset": -1.0}
            ]}},
            "potential": {"bowen": {}}
        }"#,
    );
    let out = run(&["dimension", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let err = stderr_error(&out);
    assert!(err["error"].as_str().unwrap().contains("expanding"));
}

#[test]
fn dead_survivor_tails_are_numeric_errors() {
    let tmp = TempDir::new().unwrap();
    // Avoiding symbol 0 in the golden-mean graph kills every orbit by step
    // two, so the tail fit has nothing to work with.
    let config = write_config(
        tmp.path(),
        r#"{
            "system": {"subshift": {"alphabet_size": 2, "transition": [[1,1],[1,0]]}},
            "potential": {"constant": 0.0},
            "hole": {"center": {"periodic": "0"},
                     "family": {"single_cylinder": {"n_max": 1}}},
            "run": [{"command": "oracle", "n": 1, "k_max": 12, "samples": 1000}]
        }"#,
    );
    let out = run(&["oracle", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
    assert_eq!(stderr_error(&out)["exit_code"], 3);
}

fn oracle_config(seed: u64, k_max: usize, samples: u64) -> String {
    format!(
        r#"{{
            "system": {{{FULL2}}},
            "potential": {{"constant": -0.6931471805599453}},
            "hole": {{"center": {{"periodic": "0"}},
                      "family": {{"single_cylinder": {{"n_max": 1}}}}}},
            "run": [{{"command": "oracle", "n": 1, "k_max": {k_max}, "samples": {samples}}}],
            "seed": {seed}
        }}"#
    )
}

#[test]
fn oracle_fits_log_two_on_the_symbol_hole() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), &oracle_config(5, 12, 4000));
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "oracle",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let summary = json_file(&out_dir.join("oracle.json"));
    let oracle = &summary["oracle"];
    assert_eq!(oracle["enumeration_capped"], false);
    let rate = oracle["fit"]["rate"].as_f64().unwrap();
    assert!((rate - 2f64.ln()).abs() <= 1e-6, "fitted rate {rate}");
    assert!(out_dir.join("survival_exhaustive.csv").exists());
    assert!(out_dir.join("survival_matrix.csv").exists());
    let mc = fs::read_to_string(out_dir.join("survival_mc.csv")).unwrap();
    assert!(mc.starts_with("k,survival,stderr\n"));
}

#[test]
fn oracle_outputs_are_byte_identical_for_a_repeated_seed() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), &oracle_config(9, 10, 6000));
    let mut bytes = Vec::new();
    for dir in ["a", "b"] {
        let out_dir = tmp.path().join(dir);
        let out = run(&[
            "oracle",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        bytes.push((
            fs::read(out_dir.join("survival_mc.csv")).unwrap(),
            fs::read(out_dir.join("oracle.json")).unwrap(),
        ));
    }
    assert_eq!(bytes[0], bytes[1]);

    // A different seed must actually change the sampled curve.
    let out_dir = tmp.path().join("c");
    let out = run(&[
        "oracle",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert_ne!(
        bytes[0].0,
        fs::read(out_dir.join("survival_mc.csv")).unwrap()
    );
}

#[test]
fn oracle_degrades_to_sampling_when_enumeration_overflows() {
    let tmp = TempDir::new().unwrap();
    // A deep hole keeps the survivor tree branching: short holes prune the
    // enumeration too aggressively to ever hit the node budget.
    let config = write_config(
        tmp.path(),
        &format!(
            r#"{{
                "system": {{{FULL2}}},
                "potential": {{"constant": -0.6931471805599453}},
                "hole": {{"center": {{"periodic": "0"}},
                          "family": {{"single_cylinder": {{"n_max": 8}}}}}},
                "run": [{{"command": "oracle", "n": 8, "k_max": 20, "samples": 1000}}]
            }}"#
        ),
    );
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "oracle",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("enumeration capped"));
    let summary = json_file(&out_dir.join("oracle.json"));
    assert_eq!(summary["oracle"]["enumeration_capped"], true);
    assert!(summary["oracle"]["curves"]["exhaustive"].is_null());
    assert!(!out_dir.join("survival_exhaustive.csv").exists());
    assert!(out_dir.join("survival_matrix.csv").exists());
    assert!(out_dir.join("survival_mc.csv").exists());
}

#[test]
fn format_flag_restricts_output_files() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), &cantor_escape_config(5, 2, 5));
    for (flag, expect_csv, expect_json) in [("csv", true, false), ("json", false, true)] {
        let out_dir = tmp.path().join(flag);
        let out = run(&[
            "escape",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--format",
            flag,
        ]);
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        assert_eq!(out_dir.join("escape.csv").exists(), expect_csv);
        assert_eq!(out_dir.join("escape.json").exists(), expect_json);
    }
}
