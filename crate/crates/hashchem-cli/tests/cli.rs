//! End-to-end checks of the `hashchem` binary: artifact layout, exit
//! codes, config handling, and output determinism.

use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn hashchem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hashchem"))
        .args(args)
        .env_remove("HASHCHEM_SEED")
        .output()
        .expect("spawning hashchem")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn smoke_run_completes_quickly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let started = Instant::now();
    let result = hashchem(&[
        "run",
        "--steps",
        "10",
        "--target-runs",
        "1",
        "--seed",
        "42",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    assert!(started.elapsed().as_secs() < 1, "smoke run too slow");
    assert!(out.join("run_0.csv").exists());
    assert!(out.join("average.csv").exists());
    assert!(out.join("campaign.json").exists());
    let csv = read(&out.join("run_0.csv"));
    assert!(csv.starts_with(
        "tick,population,replicated,max_f,mean_f,max_size,mean_size,cum_ind_types,cum_ho_types\n"
    ));
    assert_eq!(csv.lines().count(), 11, "header + one row per tick");
}

#[test]
fn same_seed_same_bytes_across_parallelism() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("p1");
    let out2 = dir.path().join("p8");
    for (out, par) in [(&out1, "1"), (&out2, "8")] {
        let result = hashchem(&[
            "run",
            "--steps",
            "60",
            "--target-runs",
            "2",
            "--seed",
            "7",
            "--parallelism",
            par,
            "-o",
            out.to_str().unwrap(),
        ]);
        assert!(result.status.success(), "{result:?}");
    }
    for file in ["run_0.csv", "run_1.csv", "average.csv"] {
        assert_eq!(read(&out1.join(file)), read(&out2.join(file)), "{file} differs");
    }
}

#[test]
fn env_seed_is_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("env");
    let result = Command::new(env!("CARGO_BIN_EXE_hashchem"))
        .args(["run", "--steps", "5", "--target-runs", "1", "-o", out.to_str().unwrap()])
        .env("HASHCHEM_SEED", "0x10")
        .output()
        .expect("spawning hashchem");
    assert!(result.status.success());
    assert!(read(&out.join("campaign.json")).contains("\"master_seed\": 16"));
}

#[test]
fn hex_seed_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hex");
    let result = hashchem(&[
        "run",
        "--steps",
        "5",
        "--target-runs",
        "1",
        "--seed",
        "0x2A",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    assert!(read(&out.join("campaign.json")).contains("\"master_seed\": 42"));
}

#[test]
fn config_file_applies_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"steps": 5, "target_runs": 1, "master_seed": 9, "init_pop": 3}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let result = hashchem(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--init-pop",
        "4",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let campaign = read(&out.join("campaign.json"));
    assert!(campaign.contains("\"master_seed\": 9"));
    assert!(campaign.contains("\"init_pop\": 4"), "flag must beat config file");
}

#[test]
fn unknown_config_key_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"stepz": 5}"#).unwrap();
    let result = hashchem(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("stepz"));
}

#[test]
fn invalid_param_is_config_error() {
    let result = hashchem(&["run", "--sigma", "0", "--steps", "5", "--target-runs", "1"]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("move_sigma"));
}

#[test]
fn exhausted_attempts_exit_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // fitness pinned to ~0: every attempt goes extinct
    let result = hashchem(&[
        "run",
        "--evaluator",
        "biased",
        "--biased-lo",
        "0",
        "--biased-hi",
        "1e-9",
        "--steps",
        "40",
        "--target-runs",
        "2",
        "--max-attempts",
        "2",
        "--seed",
        "3",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(3), "{result:?}");
    assert!(String::from_utf8_lossy(&result.stderr).contains("incomplete"));
    assert!(read(&out.join("campaign.json")).contains("\"complete\": false"));
}

#[test]
fn verify_subcommand_passes() {
    let result = hashchem(&["verify", "--cases", "100"]);
    assert!(result.status.success(), "{result:?}");
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert_eq!(stdout.matches("PASS").count(), 4);
    assert_eq!(stdout.matches("FAIL").count(), 0);
}

#[test]
fn keep_extinct_mode_writes_every_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let result = hashchem(&[
        "run",
        "--evaluator",
        "uniform",
        "--keep-extinct",
        "--target-runs",
        "4",
        "--steps",
        "500",
        "--seed",
        "11",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    for i in 0..4 {
        assert!(out.join(format!("run_{i}.csv")).exists());
    }
    let campaign = read(&out.join("campaign.json"));
    assert!(campaign.contains("\"mode\": \"keep_all\""));
    assert!(campaign.contains("\"attempts\": 4"));
}

#[test]
fn plot_emits_six_charts_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let result = hashchem(&[
        "run",
        "--steps",
        "40",
        "--target-runs",
        "1",
        "--seed",
        "5",
        "--plot",
        "--snapshot-ticks",
        "10,30",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let charts = std::fs::read_dir(out.join("charts")).unwrap().count();
    assert_eq!(charts, 6);
    assert!(out.join("snapshots/snapshot_10.svg").exists());
    assert!(out.join("snapshots/snapshot_30.svg").exists());
    let svg = read(&out.join("snapshots/snapshot_10.svg"));
    assert!(svg.contains("<circle"));
}
