//! Exit-code taxonomy and output contract of the `talus` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn talus() -> Command {
    Command::new(env!("CARGO_BIN_EXE_talus"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    let mut cmd = talus();
    cmd.args(args);
    cmd.output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn unknown_flag_is_a_usage_error_on_stderr() {
    let out = run(&["run1d", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--bogus"));
}

#[test]
fn missing_config_file_exits_one() {
    let out = run(&["run1d", "--config", "/nonexistent/file.cfg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn unknown_config_key_is_rejected_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(
        &path,
        "kind = 1d\ngrid.n = 50\ninit.preset = wedge\ngrid.m = 3\n",
    )
    .unwrap();
    let out = run(&["run1d", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("grid.m"), "stderr: {err}");
    assert!(err.contains(":4:"), "stderr: {err}");
}

#[test]
fn kind_mismatch_exits_one() {
    let out = run(&["run2d", "--config", config("wedge.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("kind"));
}

#[test]
fn scheme_step_failure_exits_two() {
    // The thick-layer cavity data drives the discrete scheme's step control
    // below dt_min: exit code 2, not a generic error.
    let out = run(&[
        "run1d",
        "--config",
        config("cavity21.cfg").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("dt_min"));
}

#[test]
fn check_mode_prints_verdict_lines() {
    let out = run(&[
        "run1d",
        "--config",
        config("wedge.cfg").to_str().unwrap(),
        "--check",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for property in ["max_principle", "critical_slope", "nonneg_monotone"] {
        assert!(
            text.contains(&format!("CHECK: pass {property}")),
            "missing verdict for {property} in: {text}"
        );
    }
}

#[test]
fn geyser_reports_exceedance_for_original_and_none_for_modified() {
    let cfg = config("cavity21.cfg");
    let original = run(&[
        "geyser",
        "--config",
        cfg.to_str().unwrap(),
        "--model",
        "original",
    ]);
    assert_eq!(original.status.code(), Some(0));
    assert!(stdout(&original).contains("geyser: yes"));

    let modified = run(&[
        "geyser",
        "--config",
        cfg.to_str().unwrap(),
        "--model",
        "modified",
    ]);
    assert_eq!(modified.status.code(), Some(0));
    assert!(stdout(&modified).contains("geyser: none"));
}

#[test]
fn converge_writes_report_and_mesh_directories() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "converge",
        "--config",
        config("wedge.cfg").to_str().unwrap(),
        "--meshes",
        "25,50",
        "--jobs",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("convergence.csv").is_file());
    assert!(dir.path().join("mesh_25/manifest.txt").is_file());
    assert!(dir.path().join("mesh_50/diagnostics.csv").is_file());
}

#[test]
fn converge_rejects_non_ascending_meshes() {
    let out = run(&[
        "converge",
        "--config",
        config("wedge.cfg").to_str().unwrap(),
        "--meshes",
        "100,50",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn presets_lists_all_and_describes_one() {
    let list = run(&["presets"]);
    assert_eq!(list.status.code(), Some(0));
    let text = stdout(&list);
    for name in ["cavity21", "ledge22", "critical_foot", "cavity71", "cone2d"] {
        assert!(text.contains(name), "missing {name}");
    }
    let one = run(&["presets", "cavity71"]);
    assert_eq!(one.status.code(), Some(0));
    assert!(stdout(&one).contains("init.preset = cavity71"));

    let unknown = run(&["presets", "nope"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn run_writes_manifest_with_version_and_dts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run1d",
        "--config",
        config("wedge.cfg").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let manifest = std::fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("scheme_version = "));
    assert!(manifest.contains("dt_used = "));
    assert!(manifest.contains("init.preset = wedge"));
}
