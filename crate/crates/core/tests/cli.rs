use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use isinglab::harness::{read_table, write_table, MeshRow, Report};

fn isinglab(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_isinglab"));
    cmd.args(args).env_remove("ISINGLAB_SEED");
    if let Some(s) = seed {
        cmd.env("ISINGLAB_SEED", s);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn mesh_config(dir: &Path) -> PathBuf {
    let out = dir.join("mesh-out");
    write_config(
        dir,
        "mesh.json",
        &format!(
            r#"{{"experiment":"mesh","N":8,"beta":0.6,"T":2,"replicas":3,"master_seed":5,"deltas":[0.5],"output_dir":{:?}}}"#,
            out.to_str().unwrap()
        ),
    )
}

#[test]
fn run_and_verify_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = mesh_config(dir.path());
    let run = isinglab(&["run", "--config", config.to_str().unwrap()], None);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("PASS mesh_violations"));
    let out = dir.path().join("mesh-out");
    let verify = isinglab(&["verify", "--report", out.to_str().unwrap()], None);
    assert_eq!(verify.status.code(), Some(0));
}

#[test]
fn failing_verdict_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = mesh_config(dir.path());
    isinglab(&["run", "--config", config.to_str().unwrap()], None);
    let out = dir.path().join("mesh-out");
    let mut rows: Vec<MeshRow> = read_table(&out).unwrap();
    rows[0].violated = true;
    write_table(&out, &rows).unwrap();
    let verify = isinglab(&["verify", "--report", out.to_str().unwrap()], None);
    assert_eq!(verify.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&verify.stdout).contains("FAIL mesh_violations"));
}

#[test]
fn config_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.json", r#"{"experiment":"mesh","N":8,"beta":-1,"T":2,"master_seed":5,"deltas":[0.5]}"#);
    let r = isinglab(&["run", "--config", bad.to_str().unwrap()], None);
    assert_eq!(r.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&r.stderr).contains("`beta`"));

    let missing = isinglab(&["run", "--config", "/definitely/not/here.json"], None);
    assert_eq!(missing.status.code(), Some(3));

    let good = mesh_config(dir.path());
    let r = isinglab(&["run", "--config", good.to_str().unwrap()], Some("twelve"));
    assert_eq!(r.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&r.stderr).contains("ISINGLAB_SEED"));

    let r = isinglab(&["oracle-regen", "--n", "6", "--beta", "0.6", "--out", dir.path().join("o.json").to_str().unwrap()], None);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn seed_env_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = mesh_config(dir.path());
    let r = isinglab(&["run", "--config", config.to_str().unwrap()], Some("987654321"));
    assert_eq!(r.status.code(), Some(0));
    let report = Report::read(&dir.path().join("mesh-out")).unwrap();
    assert_eq!(report.metadata.config.master_seed, 987654321);
}

#[test]
fn oracle_regen_writes_pins() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pins.json");
    let r = isinglab(&["oracle-regen", "--n", "3", "--beta", "0.6", "--out", out.to_str().unwrap()], None);
    assert_eq!(r.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.contains("two_point:1,0 = 0.95327900553533"));
    assert!(stdout.contains("generator: stationarity"));
    let pins = isinglab::exactref::OracleFile::load(&out).unwrap();
    assert_eq!(pins.entries.len(), 6);
}
