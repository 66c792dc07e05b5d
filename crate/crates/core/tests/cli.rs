//! End-to-end behaviour of the command-line tool: artifacts, exit codes,
//! configuration precedence and determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rough-chaos"));
    c.env_remove("ROUGH_CHAOS_OUT");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rough-chaos-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn constants_writes_result_and_manifest() {
    let out = scratch("constants");
    let o = run(&["constants", "--H", "0.5"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&out.join("constants.json"));
    assert_eq!(r["experiment"], "constants");
    let rows = r["rows"].as_array().unwrap();
    assert!(rows.iter().all(|row| row["pass"] != false));
    assert!(rows
        .iter()
        .all(|row| row.get("stderr").is_some() && row.get("tol").is_some()));
    let m = json(&out.join("constants.manifest.json"));
    for key in ["config", "versions", "seed"] {
        assert!(m.get(key).is_some(), "manifest lacks {key}");
    }
}

#[test]
fn csv_is_a_projection_of_json() {
    let out = scratch("csv");
    assert_eq!(run(&["constants", "--H", "0.5"], &out).status.code(), Some(0));
    assert_eq!(
        run(&["constants", "--H", "0.5", "--format", "csv"], &out).status.code(),
        Some(0)
    );
    let r = json(&out.join("constants.json"));
    let csv = fs::read_to_string(out.join("constants.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "name,estimate,stderr,tol,oracle,pass");
    assert_eq!(lines.len(), 1 + r["rows"].as_array().unwrap().len());
}

#[test]
fn reruns_and_thread_counts_give_identical_json() {
    let a = scratch("det-a");
    let b = scratch("det-b");
    let args = ["lift", "--replicas", "300", "--n", "16"];
    assert_eq!(
        run(&[&args[..], &["--threads", "1"]].concat(), &a).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&[&args[..], &["--threads", "2"]].concat(), &b).status.code(),
        Some(0)
    );
    assert_eq!(
        fs::read(a.join("lift.json")).unwrap(),
        fs::read(b.join("lift.json")).unwrap()
    );
}

#[test]
fn env_var_sets_default_output_dir() {
    let out = scratch("env");
    let o = bin()
        .args(["constants", "--H", "0.5"])
        .env("ROUGH_CHAOS_OUT", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("constants.json").exists());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let out = scratch("config");
    let cfg = out.join("run.cfg");
    fs::write(&cfg, "# lift settings\nh = 0.45\nreplicas = 100\nn = 8\n").unwrap();
    let o = run(&["lift", "--config", cfg.to_str().unwrap(), "--replicas", "120"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let p = &json(&out.join("lift.json"))["params"];
    assert_eq!(p["h"], 0.45);
    assert_eq!(p["replicas"], 120);
    assert_eq!(p["n"], 8);
}

#[test]
fn exit_codes() {
    let out = scratch("codes");
    assert_eq!(run(&["simulate", "--H", "0.9"], &out).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"], &out).status.code(), Some(2));
    let cfg = out.join("bad.cfg");
    fs::write(&cfg, "not a pair\n").unwrap();
    assert_eq!(
        run(&["constants", "--config", cfg.to_str().unwrap()], &out)
            .status
            .code(),
        Some(2)
    );
    // An impossible slope tolerance makes a checked row fail.
    let o = run(
        &[
            "verify-third-order",
            "--m-min",
            "3",
            "--m-max",
            "5",
            "--fit-m-max",
            "4",
            "--n-quad",
            "4",
            "--slope-rel-tol",
            "0",
        ],
        &out,
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn simulate_dumps_path_and_pvar_reads_grid() {
    let out = scratch("sim");
    let o = run(&["simulate", "--m", "5", "--seed", "9"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("simulate.path.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 32);
    assert_eq!(json(&out.join("simulate.manifest.json"))["seed"], 9);

    let grid = out.join("grid.json");
    fs::write(&grid, r#"{"axes": [[0, 1, 2], [0, 1]], "values": [0, 1, 2, 0, 1, 5]}"#).unwrap();
    let o = run(&["pvar", "--input", grid.to_str().unwrap(), "--p", "1.5"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&out.join("pvar.json"))["rows"].as_array().unwrap().len(), 7);
    fs::write(&grid, r#"{"axes": [[0, 1]], "values": [0]}"#).unwrap();
    assert_eq!(
        run(&["pvar", "--input", grid.to_str().unwrap()], &out).status.code(),
        Some(2)
    );
}

#[test]
fn young_check_accepts_the_golden_fixture() {
    let out = scratch("young");
    let golden = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/towghi_golden.json");
    let o = run(&["young-check", "--golden", golden], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let o = run(&["young-check", "--golden", golden, "--cases", "10"], &out);
    assert_eq!(o.status.code(), Some(2));
}
