//! Black-box checks of the `vqe` binary.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn vqe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vqe"))
}

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn map_h2(dir: &std::path::Path) -> PathBuf {
    let pauli = dir.join("h2_pauli.json");
    let status = vqe()
        .args([
            "map",
            "--integrals",
            &fixture("h2_sto3g_d0.735.json"),
            "--output",
        ])
        .arg(&pauli)
        .status()
        .unwrap();
    assert!(status.success());
    pauli
}

#[test]
fn map_then_solve_reports_reference_energy() {
    let dir = tempfile::tempdir().unwrap();
    let pauli = map_h2(dir.path());
    let out = vqe()
        .args(["solve", "--input"])
        .arg(&pauli)
        .args(["--spectrum"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let energy: f64 = stdout
        .lines()
        .next()
        .unwrap()
        .strip_prefix("ground energy: ")
        .unwrap()
        .parse()
        .unwrap();
    assert!((energy - (-1.1373060357534195)).abs() < 1e-8);
    assert_eq!(stdout.lines().count(), 2 + 16, "header + 16 levels");
}

#[test]
fn taper_reports_rank_and_sectors() {
    let dir = tempfile::tempdir().unwrap();
    let pauli = map_h2(dir.path());
    let report_path = dir.path().join("taper.json");
    let status = vqe()
        .args(["taper", "--input"])
        .arg(&pauli)
        .args(["--emit-unitary", "--output"])
        .arg(&report_path)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["r"], 2);
    assert_eq!(report["sectors"].as_array().unwrap().len(), 4);
    assert_eq!(report["tapered"]["m"], 2);
    assert_eq!(report["unitary"].as_array().unwrap().len(), 16);
    let selected = report["selected_sector"].as_str().unwrap();
    assert_eq!(selected.len(), 2);
}

#[test]
fn taper_accepts_explicit_sector() {
    let dir = tempfile::tempdir().unwrap();
    let pauli = map_h2(dir.path());
    let out = vqe()
        .args(["taper", "--input"])
        .arg(&pauli)
        .args(["--sector", "++"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report["selected_sector"], "++");
}

#[test]
fn run_with_yaml_config_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.yaml");
    fs::write(
        &config,
        format!(
            "integrals:\n  - {}\ntaper: true\nentangler: iswap2\ndepth: 1\n\
             iterations: 20\nseeds: [5]\noutput_dir: {}\n",
            fixture("h2_sto3g_d0.735.json"),
            dir.path().join("out").display()
        ),
    )
    .unwrap();
    let out = vqe().args(["run", "--config"]).arg(&config).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let outdir = dir.path().join("out");
    assert!(outdir.join("aggregate.csv").exists());
    assert!(outdir.join("report.json").exists());
    assert!(outdir.join("trace_h2_sto3g_d0.735_5.csv").exists());
}

#[test]
fn run_exits_nonzero_when_a_run_fails() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    fs::write(
        &config,
        serde_json::json!({
            "integrals": [fixture("h2_sto3g_d0.735.json"), dir.path().join("missing.json")],
            "taper": true,
            "entangler": "cnot_chain",
            "depth": 0,
            "iterations": 5,
            "seeds": [1],
            "output_dir": dir.path().join("out"),
        })
        .to_string(),
    )
    .unwrap();
    let out = vqe().args(["run", "--config"]).arg(&config).output().unwrap();
    assert!(!out.status.success());
    // the healthy geometry still produced its trace
    assert!(dir
        .path()
        .join("out")
        .join("trace_h2_sto3g_d0.735_1.csv")
        .exists());
}

#[test]
fn vqe_threads_caps_the_pool() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    fs::write(
        &config,
        serde_json::json!({
            "integrals": [fixture("h2_sto3g_d0.735.json")],
            "taper": true,
            "entangler": "cnot_chain",
            "depth": 0,
            "iterations": 5,
            "seeds": [1, 2],
            "output_dir": dir.path().join("out"),
        })
        .to_string(),
    )
    .unwrap();
    let out = vqe()
        .env("VQE_THREADS", "1")
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(out.status.success());

    let bad = vqe()
        .env("VQE_THREADS", "many")
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn solve_rejects_garbage_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"m\": 1}").unwrap();
    let out = vqe().args(["solve", "--input"]).arg(&bad).output().unwrap();
    assert!(!out.status.success());
}
