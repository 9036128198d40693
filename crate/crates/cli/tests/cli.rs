use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn cnls(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnls"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("CNLS_THREADS")
        .output()
        .expect("binary runs")
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn charge_plane_wave_table() {
    let tmp = TempDir::new().unwrap();
    let o = cnls(
        &[
            "charge",
            "--u0",
            "preset:plane_wave",
            "--T",
            "0.5",
            "--dt",
            "1e-3",
            "--N",
            "64",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("charge.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,re_q,im_q,abs_q,picard_iters");
    assert_eq!(lines.len() - 1, 501);
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[..4], [0.0, 1.0, 0.0, 1.0]);
    for name in ["config.json", "summary.json", "final_field.json"] {
        assert!(tmp.path().join(name).exists(), "{name}");
    }
}

#[test]
fn config_echo_reproduces_the_run() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let o = cnls(
        &[
            "charge",
            "--u0",
            "preset:random_hs(1,3)",
            "--N",
            "16",
            "--T",
            "0.1",
            "--lambda",
            "-1",
        ],
        a.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let echo = a.path().join("config.json");
    let o = cnls(&["charge", "--config", echo.to_str().unwrap()], b.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(files(a.path()), files(b.path()));
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = [
        "sweep-gamma",
        "--u0",
        "preset:random_hs(0.75,11)",
        "--N",
        "16",
        "--T",
        "0.2",
    ];
    let o = cnls(&args, a.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_cnls"))
        .args(args)
        .arg("--out")
        .arg(b.path())
        .env("CNLS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(files(a.path()), files(b.path()));
}

#[test]
fn validate_lattice_sum_suite_passes() {
    let tmp = TempDir::new().unwrap();
    let o = cnls(&["validate", "--suite", "lemmaB", "--check"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("validate_lemmaB.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let o = cnls(&["snls", "--frobnicate", "1"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"), "{}", stderr(&o));
    let o = cnls(&["teleport"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn module_errors_are_reported_as_json() {
    let tmp = TempDir::new().unwrap();
    let o = cnls(&["snls", "--dt", "-1"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    let line = stderr(&o);
    let doc: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(doc["error"], "InvalidParameter");
    assert!(!tmp.path().join("trajectory.csv").exists());
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.json");
    fs::write(&cfg, r#"{"N": 8, "timestep": 0.1}"#).unwrap();
    let o = cnls(
        &["snls", "--config", cfg.to_str().unwrap()],
        &tmp.path().join("out"),
    );
    assert_eq!(o.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(doc["error"], "Config");
}

#[test]
fn toml_config_with_flag_override() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "N = 8\nT = 0.05\ndt = 0.01\nepsilon = 0.5\n").unwrap();
    let out = tmp.path().join("out");
    let o = cnls(
        &[
            "snls",
            "--config",
            cfg.to_str().unwrap(),
            "--dt",
            "0.005",
            "--check",
        ],
        &out,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let echo: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(echo["N"], 8);
    assert_eq!(echo["dt"], 0.005);
    assert_eq!(echo["epsilon"], 0.5);
    let rows = fs::read_to_string(out.join("trajectory.csv"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(rows, 1 + 11);
}

#[test]
fn failed_assertion_exits_two_only_under_check() {
    let tmp = TempDir::new().unwrap();
    // nearly equal rungs: the rung gap is far below the distance to the limit
    let args = [
        "sweep-eps",
        "--eps-ladder",
        "0.0101,0.01",
        "--N",
        "16",
        "--T",
        "0.1",
    ];
    let o = cnls(&args, tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let mut with_check = args.to_vec();
    with_check.push("--check");
    let o = cnls(&with_check, tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("check failed"));
}

#[test]
fn file_initial_data_round_trips() {
    let tmp = TempDir::new().unwrap();
    let first = tmp.path().join("first");
    let o = cnls(&["scgl", "--N", "8", "--T", "0.05", "--check"], &first);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let field = first.join("final_field.json");
    let spec = format!("file:{}", field.display());
    let second = tmp.path().join("second");
    let o = cnls(
        &["snls", "--u0", &spec, "--N", "8", "--T", "0.01", "--check"],
        &second,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = cnls(
        &["snls", "--u0", "file:/no/such/field.json"],
        &tmp.path().join("third"),
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn no_temporary_files_remain() {
    let tmp = TempDir::new().unwrap();
    let o = cnls(
        &["kernels", "--N-k", "8", "--gamma-ladder", "0.2,0.1"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let names: Vec<String> = files(tmp.path()).into_keys().collect();
    assert_eq!(names, ["config.json", "kernels.csv", "kernels.json"]);
}

#[test]
fn bad_thread_count_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cnls"))
        .args(["validate", "--suite", "indicator", "--out"])
        .arg(tmp.path())
        .env("CNLS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let o = Command::new(env!("CARGO_BIN_EXE_cnls"))
        .arg("--help")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("sweep-eps"));
}
