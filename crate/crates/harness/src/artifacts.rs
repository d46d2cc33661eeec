//! Run artifacts: key-value summary, best-so-far CSV, JSON-lines event log.

use std::fmt::Write as _;
use std::path::Path;

use treeprep_core::circuit::{AnsatzSpec, ParameterVector};
use treeprep_core::optimizer::{Event, RunResult};
use treeprep_core::surrogate::{EvaluationDataset, Record};

use crate::config::Experiment;
use crate::error::{HarnessError, Result};
use crate::qasm::emit_qasm;

pub const SUMMARY_FILE: &str = "summary.txt";
pub const CURVE_FILE: &str = "curve.csv";
pub const EVENTS_FILE: &str = "events.jsonl";
pub const QASM_FILE: &str = "best.qasm";

pub fn summary_text(exp: &Experiment, result: &RunResult) -> String {
    let run = &exp.config.run;
    let metrics = exp.spec.metrics();
    let mut s = String::new();
    let mut kv = |k: &str, v: &dyn std::fmt::Display| {
        let _ = writeln!(s, "{k}={v}");
    };
    kv("target", &exp.config.target.family_name());
    kv("qubits", &exp.spec.n_qubits());
    kv("layers", &exp.spec.n_layers());
    kv("parameters", &exp.spec.param_count());
    kv("mode", &mode_name(run));
    kv("surrogate", &run.surrogate.name());
    kv("seed", &run.seed);
    kv("best_tvd", &result.y_best);
    match result.best_f_exact {
        Some(f) => kv("best_tvd_exact", &f),
        None => kv("best_tvd_exact", &"na"),
    }
    kv("evaluations", &result.evaluations);
    kv("shots", &result.shots_used);
    kv("wall_ms", &result.timings.total_ms);
    kv("warm_up_ms", &result.timings.warm_up_ms);
    kv("depth", &metrics.depth);
    kv("cx_count", &metrics.cx_count);
    s
}

pub fn mode_name(run: &treeprep_core::optimizer::RunConfig) -> &'static str {
    match run.mode {
        treeprep_core::optimizer::Mode::Full => "full",
        treeprep_core::optimizer::Mode::RandomSubspace { .. } => "random_subspace",
        treeprep_core::optimizer::Mode::Layerwise => "layerwise",
    }
}

pub fn curve_csv(result: &RunResult) -> String {
    let mut s = String::from("iteration,best_tvd,evals,shots_cum,wall_ms\n");
    for p in &result.curve {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            p.iteration, p.best_y, p.evals, p.shots_cum, p.wall_ms
        );
    }
    s
}

pub fn events_jsonl(events: &[Event]) -> String {
    let mut s = String::new();
    for e in events {
        s.push_str(&serde_json::to_string(e).expect("event serializes"));
        s.push('\n');
    }
    s
}

pub fn parse_events(text: &str) -> Result<Vec<Event>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| HarnessError::Config(format!("event log line {}: {e}", i + 1)))
        })
        .collect()
}

/// Rebuild the evaluation dataset from an event log.
pub fn dataset_from_events(events: &[Event]) -> Result<EvaluationDataset> {
    let mut data: Option<EvaluationDataset> = None;
    for e in events {
        if let Event::Evaluation {
            index,
            phase,
            y,
            f_exact,
            theta,
            ..
        } = e
        {
            let d = data.get_or_insert_with(|| EvaluationDataset::new(theta.len()));
            if *index != d.len() {
                return Err(HarnessError::Config(format!(
                    "event log out of order at evaluation {index}"
                )));
            }
            d.push(Record {
                theta: ParameterVector::new(theta.clone()),
                y: *y,
                tag: *phase,
                f_exact: *f_exact,
            })
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        }
    }
    data.ok_or_else(|| HarnessError::Config("event log has no evaluations".into()))
}

pub fn best_qasm(spec: &AnsatzSpec, result: &RunResult) -> Result<String> {
    emit_qasm(spec, &result.theta_best).map_err(HarnessError::from_run)
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| HarnessError::io(path, e))
}

pub fn write_run(dir: &Path, exp: &Experiment, result: &RunResult) -> Result<()> {
    let qasm = best_qasm(&exp.spec, result)?;
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    write(dir, SUMMARY_FILE, &summary_text(exp, result))?;
    write(dir, CURVE_FILE, &curve_csv(result))?;
    write(dir, EVENTS_FILE, &events_jsonl(&result.events))?;
    write(dir, QASM_FILE, &qasm)
}
