//! End-to-end smoke tests of the command-line binary.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fbl-sched"))
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let out = bin().arg(flag).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{flag}");
    }
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_epsilon_is_usage_error() {
    let out = bin()
        .args(["rate-tools", "--epsilon", "0.7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rate_tools_shannon_case() {
    let out = bin()
        .args(["rate-tools", "--epsilon", "0.5", "--blocklength", "128", "--data-bits", "256"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("min SINR (FBL)       : 3.000000000"), "{text}");
}

#[test]
fn solve_roundtrips_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("instance.json");
    let out = bin()
        .args(["solve", "--seed", "9", "--users", "6", "--antennas", "4"])
        .arg("--dump-instance")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let first = String::from_utf8(out.stdout).unwrap();

    let out = bin()
        .args(["solve", "--users", "6", "--antennas", "4"])
        .arg("--instance")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let second = String::from_utf8(out.stdout).unwrap();
    assert_eq!(first, second);
}

#[test]
fn solve_missing_instance_is_runtime_error() {
    let out = bin()
        .args(["solve", "--instance", "/nonexistent/instance.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = bin()
            .args([
                "sweep", "--axis", "users", "--values", "4,6", "--trials", "20",
                "--seed", "5", "--methods", "sca_tuned,shannon",
            ])
            .arg("--out")
            .arg(path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(&a).unwrap();
    let b = std::fs::read(&b).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("axis_value,method,mean_cardinality,stderr,mean_iters,infeasible_trials\n"));
    assert!(text.contains("shannon_verified"));
}

#[test]
fn sweep_without_axis_is_usage_error() {
    let out = bin().arg("sweep").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"{
            "axis": "epsilon",
            "axis_values": [1e-6, 1e-3],
            "network": {"num_antennas": 4, "num_users": 8},
            "epsilon": 1e-6,
            "blocklength_n": 128,
            "data_bits": 256,
            "trials": 10,
            "master_seed": 3,
            "methods": ["sca_tuned"]
        }"#,
    )
    .unwrap();
    let out = bin().args(["sweep", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3, "{text}");
}

#[test]
fn compare_prints_per_instance_table() {
    let out = bin()
        .args(["compare", "--users", "5", "--antennas", "2", "--trials", "4", "--seed", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("trial,sca_cardinality,es_cardinality"), "{text}");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("trial,")).count(), 4);
}

#[test]
fn compare_rejects_large_k() {
    let out = bin()
        .args(["compare", "--users", "14", "--antennas", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_trace_is_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = bin()
        .args(["solve", "--seed", "12", "--users", "8", "--antennas", "4"])
        .arg("--trace")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("tau,objective,kappa_sum,power\n"), "{text}");
}
