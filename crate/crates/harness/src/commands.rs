//! Subcommand implementations; each returns the artifacts' directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use treeprep_core::diagnostics::{DiagnosticsOptions, DiagnosticsReport};
use treeprep_core::optimizer::{run_surrogate_prep, RunConfig};
use treeprep_core::surrogate::SurrogateConfig;
use treeprep_core::targets::TargetConfig;

use crate::artifacts::{self, write, EVENTS_FILE};
use crate::bench::{self, Suite, BENCH_SEEDS};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::qasm::{emit_circuit, emit_qasm};

pub const OUT_ENV: &str = "TREEPREP_OUT";
const DEFAULT_ROOT: &str = "treeprep-out";

/// Overrides shared by the run-producing subcommands.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub deterministic: bool,
}

impl Overrides {
    fn apply(&self, run: &mut RunConfig) {
        if let Some(s) = self.seed {
            run.seed = s;
        }
        if self.deterministic {
            run.deterministic = true;
        }
    }
}

/// `--out`, else the config's `output_dir`, else `$TREEPREP_OUT/<name>`,
/// else `treeprep-out/<name>`.
pub fn resolve_out(explicit: Option<&Path>, configured: Option<&Path>, name: &str) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = configured {
        return p.to_path_buf();
    }
    let root = std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_ROOT));
    root.join(name)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into())
}

pub fn synth(config: &Path, ov: &Overrides) -> Result<PathBuf> {
    let mut cfg = ExperimentConfig::load(config)?;
    ov.apply(&mut cfg.run);
    let out = resolve_out(ov.out.as_deref(), cfg.output_dir.as_deref(), &stem(config));
    let exp = cfg.build()?;
    let result = run_surrogate_prep(&exp.target, &exp.spec, &exp.config.run)
        .map_err(HarnessError::from_run)?;
    artifacts::write_run(&out, &exp, &result)?;
    Ok(out)
}

pub fn bench(suite: Suite, config: Option<&Path>, ov: &Overrides) -> Result<(PathBuf, String)> {
    let (mut base, configured) = match config {
        Some(p) => {
            let c = ExperimentConfig::load(p)?;
            (c.run, c.output_dir)
        }
        None => (RunConfig::default(), None),
    };
    ov.apply(&mut base);
    let out = resolve_out(ov.out.as_deref(), configured.as_deref(), &format!("bench-{suite}"));
    let cells = bench::suite_cells(suite, &base);
    for c in &cells {
        c.run
            .validate(c.spec.param_count())
            .map_err(HarnessError::from_setup)?;
    }
    let rows = bench::run_cells(&cells, &BENCH_SEEDS)?;
    let summary = bench::summarize(&rows);
    bench::write_suite(&out, &rows, &summary)?;
    Ok((out, bench::summary_table(&summary)))
}

#[derive(Serialize)]
struct TargetRecord<'a> {
    config: &'a TargetConfig,
    n_qubits: usize,
    probabilities: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    hidden_theta: Option<&'a [f64]>,
}

pub fn target_gen(config: &Path, ov: &Overrides) -> Result<PathBuf> {
    let cfg = ExperimentConfig::load(config)?;
    let out = resolve_out(
        ov.out.as_deref(),
        cfg.output_dir.as_deref(),
        &format!("{}-target", stem(config)),
    );
    let target = cfg.target.generate().map_err(HarnessError::from_setup)?;
    let record = TargetRecord {
        config: target.config(),
        n_qubits: target.n_qubits(),
        probabilities: target.exact_distribution().probs(),
        hidden_theta: target.hidden_instance().map(|(_, t)| t.as_slice()),
    };
    let qasm = match (target.hidden_instance(), target.generator()) {
        (Some((spec, theta)), _) => Some(emit_qasm(spec, theta).map_err(HarnessError::from_run)?),
        (None, Some(c)) => Some(emit_circuit(c)),
        (None, None) => None,
    };
    std::fs::create_dir_all(&out).map_err(|e| HarnessError::io(&out, e))?;
    let json = serde_json::to_string_pretty(&record).expect("target serializes");
    write(&out, "target.json", &(json + "\n"))?;
    if let Some(q) = qasm {
        write(&out, "target.qasm", &q)?;
    }
    Ok(out)
}

/// Diagnostics over a finished run directory's event log.
pub fn diag(run_dir: &Path, events: Option<&Path>, config: Option<&Path>) -> Result<PathBuf> {
    let mut opts = DiagnosticsOptions::default();
    if let Some(p) = config {
        let c = ExperimentConfig::load(p)?;
        opts = c.diagnostics;
        if let SurrogateConfig::Gbrt(g) = c.run.surrogate {
            opts.learning_rate = g.learning_rate;
            opts.max_trees = g.n_trees;
        }
        if opts.f_star.is_none() && matches!(c.target, TargetConfig::Vqe { .. }) {
            opts.f_star = Some(0.0);
        }
    }
    let path = events
        .map(Path::to_path_buf)
        .unwrap_or_else(|| run_dir.join(EVENTS_FILE));
    let text = std::fs::read_to_string(&path)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    let data = artifacts::dataset_from_events(&artifacts::parse_events(&text)?)?;
    let report = DiagnosticsReport::from_dataset(&data, &opts).map_err(HarnessError::from_run)?;
    std::fs::create_dir_all(run_dir).map_err(|e| HarnessError::io(run_dir, e))?;
    write(run_dir, "diagnostics.csv", &diagnostics_csv(&report))?;
    write(run_dir, "diagnostics.txt", &diagnostics_summary(&report, &opts))?;
    Ok(run_dir.to_path_buf())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "na".into(), |x| x.to_string())
}

pub fn diagnostics_csv(r: &DiagnosticsReport) -> String {
    let mut s = String::from("t,covering_radius,packing_bound,eta,regret,best_regret\n");
    for t in 0..r.covering_radius.len() {
        let (reg, best) = match &r.regret {
            Some(c) => (Some(c.instantaneous[t]), Some(c.best_so_far[t])),
            None => (None, None),
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            t + 1,
            r.covering_radius[t],
            r.packing_bound[t],
            r.eta[t],
            opt(reg),
            opt(best)
        );
    }
    s
}

pub fn diagnostics_summary(r: &DiagnosticsReport, opts: &DiagnosticsOptions) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "iterations={}", r.covering_radius.len());
    let _ = writeln!(s, "covering_radius={}", opt(r.covering_radius.last().copied()));
    let _ = writeln!(s, "packing_bound={}", opt(r.packing_bound.last().copied()));
    let _ = writeln!(s, "probe_resolution={}", opts.resolution);
    let _ = writeln!(s, "f_star={}", opt(opts.f_star));
    let _ = writeln!(s, "rate_exponent={}", opt(r.regret.as_ref().and_then(|c| c.exponent)));
    let _ = writeln!(s, "lipschitz_lower_bound={}", r.lipschitz_lower_bound);
    let _ = writeln!(s, "noise_bound={}", opt(r.noise_bound));
    s
}
