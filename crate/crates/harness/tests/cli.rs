use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::{tempdir, TempDir};
use treeprep::artifacts::{dataset_from_events, parse_events};

const VQE: &str = r#"
[target]
family = "vqe"
qubits = 2
layers = 2
seed = 4

[ansatz]
qubits = 2
layers = 2

[run]
max_evaluations = 40
shots = 300
"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_treeprep"));
    c.env_remove("TREEPREP_OUT");
    c
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn synth(config: &Path, out: &Path) -> Output {
    run(bin()
        .args(["synth", "--deterministic", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out))
}

fn summary_value(summary: &str, key: &str) -> String {
    summary
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("missing {key}"))
        .to_string()
}

#[test]
fn synth_writes_all_artifacts() {
    let dir = tempdir().unwrap();
    let cfg = write_config(&dir, "vqe.toml", VQE);
    let out = dir.path().join("run");
    let o = synth(&cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["summary.txt", "curve.csv", "events.jsonl", "best.qasm"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let qasm = std::fs::read_to_string(out.join("best.qasm")).unwrap();
    assert!(qasm.starts_with("OPENQASM 2.0;"));
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert_eq!(summary_value(&summary, "evaluations"), "40");
    assert_eq!(summary_value(&summary, "wall_ms"), "0");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempdir().unwrap();
    let cfg = write_config(&dir, "vqe.toml", VQE);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(synth(&cfg, &a).status.success());
    assert!(synth(&cfg, &b).status.success());
    for f in ["summary.txt", "curve.csv", "events.jsonl", "best.qasm"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let c = dir.path().join("c");
    assert!(run(bin()
        .args(["synth", "--deterministic", "--seed", "9", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&c))
    .status
    .success());
    assert_ne!(
        std::fs::read(a.join("events.jsonl")).unwrap(),
        std::fs::read(c.join("events.jsonl")).unwrap()
    );
}

#[test]
fn summary_and_curve_agree_with_event_log() {
    let dir = tempdir().unwrap();
    let cfg = write_config(&dir, "vqe.toml", VQE);
    let out = dir.path().join("run");
    assert!(synth(&cfg, &out).status.success());
    let events = parse_events(&std::fs::read_to_string(out.join("events.jsonl")).unwrap()).unwrap();
    let data = dataset_from_events(&events).unwrap();
    let best = data.best().unwrap();
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert_eq!(summary_value(&summary, "best_tvd").parse::<f64>().unwrap(), best.y);
    assert_eq!(
        summary_value(&summary, "best_tvd_exact").parse::<f64>().unwrap(),
        best.f_exact.unwrap()
    );
    assert_eq!(summary_value(&summary, "evaluations"), data.len().to_string());
    assert_eq!(summary_value(&summary, "shots"), (300 * data.len()).to_string());

    let curve = std::fs::read_to_string(out.join("curve.csv")).unwrap();
    let mut lines = curve.lines();
    assert_eq!(lines.next(), Some("iteration,best_tvd,evals,shots_cum,wall_ms"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(!rows.is_empty());
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0] && w[1][1] <= w[0][1]));
    assert_eq!(rows.last().unwrap()[1], best.y);
    assert_eq!(rows.last().unwrap()[2], data.len() as f64);
}

#[test]
fn malformed_config_exits_two_without_outputs() {
    let dir = tempdir().unwrap();
    let cfg = write_config(&dir, "bad.toml", &format!("{VQE}\nbogus_key = 1\n"));
    let out = dir.path().join("run");
    let o = synth(&cfg, &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());

    let cfg = write_config(&dir, "syntax.toml", "[target\nfamily = ");
    assert_eq!(synth(&cfg, &out).status.code(), Some(2));
    assert!(!out.exists());

    let missing = dir.path().join("nope.toml");
    assert_eq!(synth(&missing, &out).status.code(), Some(2));
}

#[test]
fn oversized_register_exits_three() {
    let dir = tempdir().unwrap();
    let body = VQE.replace("qubits = 2", "qubits = 13");
    let cfg = write_config(&dir, "big.toml", &body);
    let out = dir.path().join("run");
    let o = synth(&cfg, &out);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
}

#[test]
fn unknown_suite_exits_two() {
    let dir = tempdir().unwrap();
    let o = run(bin().args(["bench", "--suite", "q9", "--out"]).arg(dir.path().join("b")));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_q3_grid_with_small_budget() {
    let dir = tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "budget.toml",
        "[target]\nfamily = \"vqe\"\nqubits = 3\nlayers = 3\nseed = 77\n\n[ansatz]\nqubits = 3\nlayers = 3\n\n[run]\nmax_evaluations = 32\n",
    );
    let out = dir.path().join("bench");
    let o = run(bin()
        .args(["bench", "--suite", "q3", "--deterministic", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = std::fs::read_to_string(out.join("rows.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 80);
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 16);
    assert!(String::from_utf8_lossy(&o.stdout).contains("L5_s10000"));
}

#[test]
fn target_gen_and_diag() {
    let dir = tempdir().unwrap();
    let cfg = write_config(&dir, "vqe.toml", VQE);
    let tdir = dir.path().join("target");
    let o = run(bin().args(["target", "gen", "--config"]).arg(&cfg).arg("--out").arg(&tdir));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tdir.join("target.json")).unwrap()).unwrap();
    let probs: Vec<f64> = json["probabilities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(probs.len(), 4);
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    assert!(std::fs::read_to_string(tdir.join("target.qasm")).unwrap().contains("cx q[0],q[1];"));

    let out = dir.path().join("run");
    assert!(synth(&cfg, &out).status.success());
    let o = run(bin().args(["diag", "--out"]).arg(&out).arg("--config").arg(&cfg));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,covering_radius,packing_bound,eta,regret,best_regret"));
    let radii: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(radii.len(), 40);
    assert!(radii.windows(2).all(|w| w[1] <= w[0]));
    let txt = std::fs::read_to_string(out.join("diagnostics.txt")).unwrap();
    assert!(txt.contains("f_star=0"));

    let o = run(bin().args(["diag", "--out"]).arg(dir.path().join("empty")));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_root_from_environment() {
    let dir = tempdir().unwrap();
    let cfg = write_config(&dir, "envrun.toml", VQE);
    let root = dir.path().join("root");
    let o = run(bin()
        .env("TREEPREP_OUT", &root)
        .args(["synth", "--deterministic", "--config"])
        .arg(&cfg));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(root.join("envrun").join("curve.csv").is_file());
}
