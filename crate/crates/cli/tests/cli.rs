//! End-to-end checks of the binary: exit codes, report files, and
//! option precedence, run against the fixture bundles shipped with the
//! core crate.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn gvckit(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gvckit"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("GVCKIT_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn validate_passes_on_balanced_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = gvckit(
        &["validate", fixture("e2").to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    assert!(stdout(&out).contains("balance: PASS"));
}

/// Copy the E2 bundle and corrupt one intermediate cell.
fn imbalanced_bundle(dir: &Path) -> PathBuf {
    let bundle = dir.join("broken");
    fs::create_dir(&bundle).unwrap();
    for file in ["meta.json", "Z.csv", "F.csv", "va.csv", "x.csv", "emp.csv"] {
        fs::copy(fixture("e2").join(file), bundle.join(file)).unwrap();
    }
    let z = fs::read_to_string(bundle.join("Z.csv")).unwrap();
    fs::write(bundle.join("Z.csv"), z.replace("20,10", "25,10")).unwrap();
    bundle
}

#[test]
fn validate_fails_with_exit_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = imbalanced_bundle(dir.path());
    let out = gvckit(&["validate", bundle.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(stdout(&out).contains("balance: FAIL"));
}

#[test]
fn tiva_refuses_imbalanced_bundle_unless_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = imbalanced_bundle(dir.path());
    let out = gvckit(&["tiva", bundle.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    let out = gvckit(
        &["--allow-imbalance", "tiva", bundle.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn missing_bundle_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = gvckit(&["tiva", "/nonexistent/bundle"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn tiva_writes_frozen_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let out = gvckit(&["tiva", fixture("e2").to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{out:?}");
    let csv = fs::read_to_string(dir.path().join("dva_fva.csv")).unwrap();
    assert!(csv.contains("A,30,26.7272727273,3.27272727273"), "{csv}");
    let part = fs::read_to_string(dir.path().join("participation.csv")).unwrap();
    assert!(part.contains("0.215151515152"), "{part}");
}

#[test]
fn json_format_flag_changes_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = gvckit(
        &["--format", "json", "position", fixture("e2").to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("position.json").exists());
    assert!(!dir.path().join("position.csv").exists());
    let json = fs::read_to_string(dir.path().join("position.json")).unwrap();
    assert!(json.starts_with("{\"columns\":"), "{json}");
}

#[test]
fn network_exports_dot_graph() {
    let dir = tempfile::tempdir().unwrap();
    let out = gvckit(
        &[
            "network",
            fixture("e2").to_str().unwrap(),
            "--graph",
            "dot",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let dot = fs::read_to_string(dir.path().join("va_flows.dot")).unwrap();
    assert!(dot.contains("digraph"), "{dot}");
    assert!(dot.contains("\"A\" -> \"B\""), "{dot}");
}

#[test]
fn gross_trade_reports_coverage_and_rankings() {
    let dir = tempfile::tempdir().unwrap();
    let out = gvckit(
        &[
            "gross-trade",
            "--trade",
            fixture("trade.csv").to_str().unwrap(),
            "--classmap",
            fixture("classmap.csv").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("coverage.csv").exists());
    assert!(dir.path().join("top_exports.csv").exists());
    assert!(dir.path().join("unit_values.csv").exists());
}

#[test]
fn growth_between_bundles() {
    let dir = tempfile::tempdir().unwrap();
    // Same scheme, different numbers: E2 against itself is a zero delta.
    let out = gvckit(
        &[
            "growth",
            fixture("e2").to_str().unwrap(),
            fixture("e2").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let csv = fs::read_to_string(dir.path().join("export_growth.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("A,0,0,0,0,0"), "{csv}");
}

#[test]
fn econ_subcommands_run_on_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let panel = fixture("panel.csv");
    let out = gvckit(
        &[
            "econ", "corr", "--panel", panel.to_str().unwrap(), "--x", "lpi", "--y",
            "participation",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    assert!(stdout(&out).contains("pearson(lpi, participation)"));

    let out = gvckit(
        &[
            "econ", "ols", "--panel", panel.to_str().unwrap(), "--y", "participation", "--x",
            "lpi", "--fe", "id",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("ols.csv").exists());

    let out = gvckit(
        &[
            "econ", "logit", "--firms", fixture("firms.csv").to_str().unwrap(), "--x", "size",
            "--x", "skill_share",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("logit.csv").exists());

    let out = gvckit(
        &[
            "econ", "describe", "--panel", panel.to_str().unwrap(), "--by", "id", "--var",
            "participation",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("describe.csv").exists());
}

#[test]
fn unknown_panel_variable_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = gvckit(
        &[
            "econ", "corr", "--panel", fixture("panel.csv").to_str().unwrap(), "--x", "nope",
            "--y", "lpi",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn tolerance_precedence_flag_beats_env() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = imbalanced_bundle(dir.path());
    // A huge env tolerance would let the imbalance through...
    let out = Command::new(env!("CARGO_BIN_EXE_gvckit"))
        .arg("--out")
        .arg(dir.path())
        .args(["validate", bundle.to_str().unwrap()])
        .env("GVCKIT_TOL", "1.0")
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    // ...but an explicit strict flag still wins over the env variable.
    let out = Command::new(env!("CARGO_BIN_EXE_gvckit"))
        .arg("--out")
        .arg(dir.path())
        .args(["--tol", "1e-9", "validate", bundle.to_str().unwrap()])
        .env("GVCKIT_TOL", "1.0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    let out_dir = dir.path().join("from_config");
    fs::write(
        &config,
        format!(
            "{{\"format\": \"json\", \"out\": \"{}\"}}",
            out_dir.display()
        ),
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gvckit"))
        .args([
            "--config",
            config.to_str().unwrap(),
            "position",
            fixture("e2").to_str().unwrap(),
        ])
        .env_remove("GVCKIT_TOL")
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    assert!(out_dir.join("position.json").exists());
    assert!(!out_dir.join("position.csv").exists());
}

#[test]
fn report_runs_everything_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &Path| {
        let o = gvckit(&["report", fixture("e2").to_str().unwrap()], out);
        assert!(o.status.success(), "{o:?}");
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run(&a);
    run(&b);
    for file in ["dva_fva.csv", "network.csv", "dva_fva.svg"] {
        let left = fs::read(a.join(file)).unwrap();
        let right = fs::read(b.join(file)).unwrap();
        assert_eq!(left, right, "{file} differs between runs");
    }
    let svg = fs::read_to_string(a.join("dva_fva.svg")).unwrap();
    assert!(svg.contains("<rect"), "bar chart should contain rects");
}
