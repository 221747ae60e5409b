use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn herzlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_herzlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn small_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("small.toml");
    fs::write(
        &path,
        format!("[grid]\nsamples = 2048\n\n[corpus]\nsize = 8\n{extra}"),
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn passing_suite_exits_zero_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out_dir = dir.path().join("out");
    let out = herzlab(&[
        "run",
        "herz",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for ext in ["csv", "json", "svg"] {
        assert!(out_dir.join(format!("herz.{ext}")).is_file(), "{ext}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("herz.json")).unwrap()).unwrap();
    assert!(json.is_object());
}

#[test]
fn violated_threshold_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // A spread is a max/min ratio, never below one.
    let cfg = small_config(dir.path(), "\n[thresholds]\nsplit_spread = 0.5\n");
    let out_dir = dir.path().join("out");
    let out = herzlab(&[
        "run",
        "herz",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out_dir = out_dir.to_str().unwrap();
    for args in [
        vec!["run", "no_such_suite", "--out", out_dir],
        vec!["estimate", "vT9", "--out", out_dir],
        vec!["estimate", "five_norms:norm1/norm1", "--out", out_dir],
        vec!["norms", "--input", "square:1"],
        vec!["run", "herz", "--grid-n", "many"],
        vec!["frobnicate"],
    ] {
        let out = herzlab(&args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn missing_config_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.toml");
    let out = herzlab(&["run", "herz", "--config", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn norms_prints_every_norm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = herzlab(&["norms", "--input", "gaussian:1", "--params", &cfg]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["tl ", "tl_admissible", "tl_peetre", "norm1", "norm5"] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}
