//! Desk-scale benchmark suites over pinned fixtures.
//!
//! * `q1`: GBRT against QRF surrogates on three RQC targets.
//! * `q2`: full-space, random-subspace, and layerwise search on the same targets.
//! * `q3`: ansatz depth × shots-per-evaluation sweep on a VQE target.
//!
//! Each cell runs once per seed in [`BENCH_SEEDS`]. The reported final TVD
//! is the noise-free loss at the returned parameters.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use treeprep_core::circuit::{AnsatzSpec, Rotation};
use treeprep_core::optimizer::{run_surrogate_prep, Mode, RunConfig};
use treeprep_core::surrogate::{GbrtParams, QrfParams, SurrogateConfig};
use treeprep_core::targets::TargetConfig;

use crate::artifacts::write;
use crate::error::{HarnessError, Result};

pub const BENCH_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
pub const RQC_FIXTURES: [u64; 3] = [500, 501, 502];
pub const RQC_QUBITS: usize = 3;
pub const RQC_DEPTH: usize = 3;
pub const RQC_LAYERS: usize = 3;
pub const SUITE_SHOTS: u64 = 250;
pub const VQE_QUBITS: usize = 3;
pub const VQE_LAYERS: usize = 3;
pub const VQE_SEED: u64 = 77;
pub const Q3_LAYERS: [usize; 4] = [2, 3, 4, 5];
pub const Q3_SHOTS: [u64; 4] = [75, 250, 500, 10_000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Q1,
    Q2,
    Q3,
}

impl FromStr for Suite {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q1" => Ok(Suite::Q1),
            "q2" => Ok(Suite::Q2),
            "q3" => Ok(Suite::Q3),
            other => Err(HarnessError::Config(format!(
                "unknown suite `{other}` (expected q1, q2, or q3)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Q1 => "q1",
            Suite::Q2 => "q2",
            Suite::Q3 => "q3",
        })
    }
}

/// One benchmark configuration, repeated over seeds.
#[derive(Debug, Clone)]
pub struct Cell {
    pub fixture: String,
    pub variant: String,
    pub target: TargetConfig,
    pub spec: AnsatzSpec,
    pub run: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub fixture: String,
    pub variant: String,
    pub layers: usize,
    pub shots_per_eval: u64,
    pub seed: u64,
    pub final_tvd: f64,
    pub best_observed: f64,
    pub evaluations: usize,
    pub shots: u64,
    pub wall_ms: u64,
    pub depth: usize,
    pub cx_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub fixture: String,
    pub variant: String,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub mean_wall_ms: f64,
}

pub fn vqe_fixture() -> TargetConfig {
    TargetConfig::Vqe {
        qubits: VQE_QUBITS,
        layers: VQE_LAYERS,
        seed: VQE_SEED,
        rotations: vec![Rotation::Ry, Rotation::Rz],
    }
}

fn rqc_cells(variants: &[(&str, RunConfig)]) -> Vec<Cell> {
    let spec = AnsatzSpec::standard(RQC_QUBITS, RQC_LAYERS).expect("fixture ansatz");
    RQC_FIXTURES
        .iter()
        .flat_map(|&seed| {
            let spec = spec.clone();
            variants.iter().map(move |(name, run)| Cell {
                fixture: format!("rqc{seed}"),
                variant: name.to_string(),
                target: TargetConfig::Rqc {
                    qubits: RQC_QUBITS,
                    depth: RQC_DEPTH,
                    seed,
                },
                spec: spec.clone(),
                run: run.clone(),
            })
        })
        .collect()
}

/// Cells of `suite`, derived from `base` (budget, seed offset, timing mode).
pub fn suite_cells(suite: Suite, base: &RunConfig) -> Vec<Cell> {
    let shot_base = RunConfig {
        shots: Some(SUITE_SHOTS),
        ..base.clone()
    };
    match suite {
        Suite::Q1 => rqc_cells(&[
            (
                "gbrt",
                RunConfig {
                    mode: Mode::Layerwise,
                    surrogate: SurrogateConfig::Gbrt(GbrtParams::default()),
                    ..shot_base.clone()
                },
            ),
            (
                "qrf",
                RunConfig {
                    mode: Mode::Layerwise,
                    surrogate: SurrogateConfig::Qrf(QrfParams::default()),
                    ..shot_base.clone()
                },
            ),
        ]),
        Suite::Q2 => {
            let per_layer = AnsatzSpec::standard(RQC_QUBITS, RQC_LAYERS)
                .expect("fixture ansatz")
                .params_per_layer();
            let gbrt = RunConfig {
                surrogate: SurrogateConfig::Gbrt(GbrtParams::default()),
                ..shot_base.clone()
            };
            rqc_cells(&[
                (
                    "full",
                    RunConfig {
                        mode: Mode::Full,
                        ..gbrt.clone()
                    },
                ),
                (
                    "random_subspace",
                    RunConfig {
                        mode: Mode::RandomSubspace {
                            block_size: per_layer,
                            reshuffle_each_cycle: true,
                        },
                        ..gbrt.clone()
                    },
                ),
                (
                    "layerwise",
                    RunConfig {
                        mode: Mode::Layerwise,
                        ..gbrt
                    },
                ),
            ])
        }
        Suite::Q3 => {
            let target = vqe_fixture();
            let mut cells = Vec::new();
            for &layers in &Q3_LAYERS {
                for &shots in &Q3_SHOTS {
                    cells.push(Cell {
                        fixture: "vqe".into(),
                        variant: format!("L{layers}_s{shots}"),
                        target: target.clone(),
                        spec: AnsatzSpec::standard(target.n_qubits(), layers)
                            .expect("fixture ansatz"),
                        run: RunConfig {
                            mode: Mode::Layerwise,
                            shots: Some(shots),
                            ..base.clone()
                        },
                    });
                }
            }
            cells
        }
    }
}

fn run_one(cell: &Cell, seed: u64) -> Result<BenchRow> {
    let target = cell.target.generate().map_err(HarnessError::from_setup)?;
    let run = RunConfig {
        seed: cell.run.seed.wrapping_add(seed),
        ..cell.run.clone()
    };
    let r = run_surrogate_prep(&target, &cell.spec, &run).map_err(HarnessError::from_run)?;
    let m = cell.spec.metrics();
    Ok(BenchRow {
        fixture: cell.fixture.clone(),
        variant: cell.variant.clone(),
        layers: cell.spec.n_layers(),
        shots_per_eval: run.shots.unwrap_or(0),
        seed: run.seed,
        final_tvd: r.best_f_exact.unwrap_or(r.y_best),
        best_observed: r.y_best,
        evaluations: r.evaluations,
        shots: r.shots_used,
        wall_ms: r.timings.total_ms,
        depth: m.depth,
        cx_count: m.cx_count,
    })
}

/// Run every (cell, seed) pair; rows come back in cell-major, seed-minor order.
pub fn run_cells(cells: &[Cell], seeds: &[u64]) -> Result<Vec<BenchRow>> {
    let jobs: Vec<(&Cell, u64)> = cells
        .iter()
        .flat_map(|c| seeds.iter().map(move |&s| (c, s)))
        .collect();
    jobs.par_iter().map(|(c, s)| run_one(c, *s)).collect()
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Sample standard deviation (`n − 1` denominator).
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = values.iter().sum::<f64>() / n as f64;
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// Per-cell statistics of the final TVD, in first-appearance order.
pub fn summarize(rows: &[BenchRow]) -> Vec<CellSummary> {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in rows {
        let k = (r.fixture.clone(), r.variant.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(fixture, variant)| {
            let cell: Vec<&BenchRow> = rows
                .iter()
                .filter(|r| r.fixture == fixture && r.variant == variant)
                .collect();
            let v: Vec<f64> = cell.iter().map(|r| r.final_tvd).collect();
            let n = v.len();
            CellSummary {
                runs: n,
                mean: v.iter().sum::<f64>() / n as f64,
                std: sample_std(&v),
                median: median(&v),
                min: v.iter().copied().fold(f64::INFINITY, f64::min),
                max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                mean_wall_ms: cell.iter().map(|r| r.wall_ms as f64).sum::<f64>() / n as f64,
                fixture,
                variant,
            }
        })
        .collect()
}

pub fn rows_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(
        "fixture,variant,layers,shots_per_eval,seed,final_tvd,best_observed,evaluations,shots,wall_ms,depth,cx_count\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.fixture,
            r.variant,
            r.layers,
            r.shots_per_eval,
            r.seed,
            r.final_tvd,
            r.best_observed,
            r.evaluations,
            r.shots,
            r.wall_ms,
            r.depth,
            r.cx_count
        );
    }
    s
}

pub fn summary_csv(cells: &[CellSummary]) -> String {
    let mut s = String::from("fixture,variant,runs,mean,std,median,min,max,mean_wall_ms\n");
    for c in cells {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            c.fixture, c.variant, c.runs, c.mean, c.std, c.median, c.min, c.max, c.mean_wall_ms
        );
    }
    s
}

/// Fixed-width table for the terminal.
pub fn summary_table(cells: &[CellSummary]) -> String {
    let mut s = format!(
        "{:<10} {:<16} {:>4} {:>8} {:>8} {:>8} {:>10}\n",
        "fixture", "variant", "runs", "mean", "std", "median", "wall_ms"
    );
    for c in cells {
        let _ = writeln!(
            s,
            "{:<10} {:<16} {:>4} {:>8.4} {:>8.4} {:>8.4} {:>10.0}",
            c.fixture, c.variant, c.runs, c.mean, c.std, c.median, c.mean_wall_ms
        );
    }
    s
}

pub fn write_suite(dir: &Path, rows: &[BenchRow], cells: &[CellSummary]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    write(dir, "rows.csv", &rows_csv(rows))?;
    write(dir, "summary.csv", &summary_csv(cells))
}
