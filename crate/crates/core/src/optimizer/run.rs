use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{BlockTraining, Execution, Mode, RunConfig};
use super::objective::{Objective, StatePrepObjective};
use super::partition::{random_partition, LayerPartition};
use crate::acquisition::{propose_next, SearchBox};
use crate::circuit::{AnsatzSpec, ParameterVector};
use crate::error::{Error, Result};
use crate::seed::{self, Stream};
use crate::surrogate::{EvaluationDataset, Phase, Record};
use crate::targets::TargetSpec;

/// Line-delimited run log entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Evaluation {
        index: usize,
        ms: u64,
        phase: Phase,
        cycle: usize,
        y: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f_exact: Option<f64>,
        theta: Vec<f64>,
    },
    Partition {
        cycle: usize,
        blocks: Vec<Vec<usize>>,
    },
    Sync {
        cycle: usize,
        ms: u64,
        improved_blocks: Vec<usize>,
        composed_index: Option<usize>,
        best_index: usize,
        best_y: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub iteration: usize,
    pub best_y: f64,
    pub evals: usize,
    pub shots_cum: u64,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub warm_up_ms: u64,
    pub optimize_ms: u64,
    pub total_ms: u64,
}

/// Mutable state between synchronization barriers.
#[derive(Debug, Clone)]
pub struct RunState {
    pub dataset: EvaluationDataset,
    pub events: Vec<Event>,
    pub curve: Vec<CurvePoint>,
    pub cycle: usize,
    pub shots_used: u64,
}

impl RunState {
    pub fn new(dim: usize) -> Self {
        RunState {
            dataset: EvaluationDataset::new(dim),
            events: Vec::new(),
            curve: Vec::new(),
            cycle: 0,
            shots_used: 0,
        }
    }

    /// Lowest-loss record so far.
    pub fn incumbent(&self) -> Option<&Record> {
        self.dataset.best()
    }

    fn best(&self) -> (usize, f64) {
        let i = self.dataset.best_index().expect("state has records");
        (i, self.dataset.records()[i].y)
    }
}

/// Evaluations produced by one block worker.
#[derive(Debug, Clone)]
pub struct BlockResult {
    pub block_id: usize,
    pub block: Vec<usize>,
    pub records: Vec<Record>,
    pub ms: Vec<u64>,
    pub shots: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub theta_best: ParameterVector,
    pub y_best: f64,
    /// Noise-free loss at `theta_best` when the objective reports it.
    pub best_f_exact: Option<f64>,
    pub dataset: EvaluationDataset,
    pub curve: Vec<CurvePoint>,
    pub events: Vec<Event>,
    pub evaluations: usize,
    pub shots_used: u64,
    pub timings: PhaseTimings,
}

impl RunResult {
    /// Best observed loss after each evaluation.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.dataset
            .records()
            .iter()
            .map(|r| {
                best = best.min(r.y);
                best
            })
            .collect()
    }
}

pub struct Optimizer<'a, O: Objective> {
    objective: &'a O,
    cfg: &'a RunConfig,
    layers: LayerPartition,
    start: Instant,
}

impl<'a, O: Objective> Optimizer<'a, O> {
    /// `layers` is the partition used in layerwise mode.
    pub fn new(objective: &'a O, cfg: &'a RunConfig, layers: LayerPartition) -> Result<Self> {
        let d = objective.dim();
        cfg.validate(d)?;
        LayerPartition::new(d, layers.blocks().to_vec())?;
        Ok(Optimizer {
            objective,
            cfg,
            layers,
            start: Instant::now(),
        })
    }

    fn now_ms(&self) -> u64 {
        if self.cfg.deterministic {
            0
        } else {
            self.start.elapsed().as_millis() as u64
        }
    }

    fn budget_left(&self, state: &RunState) -> usize {
        self.cfg
            .max_evaluations
            .map_or(usize::MAX, |m| m.saturating_sub(state.dataset.len()))
    }

    fn append(&self, state: &mut RunState, record: Record, ms: u64, shots: u64) -> Result<()> {
        let index = state.dataset.len();
        state.events.push(Event::Evaluation {
            index,
            ms,
            phase: record.tag,
            cycle: state.cycle,
            y: record.y,
            f_exact: record.f_exact,
            theta: record.theta.as_slice().to_vec(),
        });
        state.shots_used += shots;
        state.dataset.push(record)
    }

    fn push_curve(&self, state: &mut RunState, iteration: usize) {
        let (_, best_y) = state.best();
        state.curve.push(CurvePoint {
            iteration,
            best_y,
            evals: state.dataset.len(),
            shots_cum: state.shots_used,
            wall_ms: self.now_ms(),
        });
    }

    /// Uniform draws over the full box; the warm-up respects the evaluation budget
    /// but always takes at least one point.
    pub fn warm_up(&self, mut state: RunState) -> Result<RunState> {
        let d = self.objective.dim();
        let n = self
            .cfg
            .warm_up_count(d)
            .min(self.budget_left(&state).max(1));
        for i in 0..n {
            let index = state.dataset.len() as u64;
            let mut rng = seed::rng(seed::stream_seed(self.cfg.seed, Stream::WarmUp, &[i as u64]));
            let theta = ParameterVector::uniform(d, &mut rng);
            let obs = self.objective.evaluate(&theta, index)?;
            let ms = self.now_ms();
            self.append(
                &mut state,
                Record {
                    theta,
                    y: obs.y,
                    tag: Phase::WarmUp,
                    f_exact: obs.f_exact,
                },
                ms,
                obs.shots,
            )?;
        }
        self.push_curve(&mut state, 0);
        Ok(state)
    }

    fn training_set(
        &self,
        snapshot: &EvaluationDataset,
        incumbent: &ParameterVector,
        block: &[usize],
        local: &[Record],
    ) -> (Vec<Vec<f64>>, Vec<f64>) {
        let in_slice = |r: &Record| {
            let mut on_block = vec![false; incumbent.len()];
            for &i in block {
                on_block[i] = true;
            }
            r.theta
                .as_slice()
                .iter()
                .zip(incumbent.as_slice())
                .enumerate()
                .all(|(j, (a, b))| on_block[j] || a == b)
        };
        let select: Vec<&Record> = match self.cfg.block_training {
            BlockTraining::AllRecords => snapshot.records().iter().chain(local).collect(),
            BlockTraining::EpochRecords => {
                let slice: Vec<&Record> = snapshot
                    .records()
                    .iter()
                    .chain(local)
                    .filter(|r| in_slice(r))
                    .collect();
                if slice.len() >= self.cfg.surrogate.min_records().max(2) {
                    slice
                } else {
                    snapshot.records().iter().chain(local).collect()
                }
            }
        };
        let x = select.iter().map(|r| r.theta.project(block)).collect();
        let y = select.iter().map(|r| r.y).collect();
        (x, y)
    }

    /// Propose and evaluate `iters` points that differ from the snapshot
    /// incumbent only on `block`. Evaluation `k` gets global index `first_index + k`.
    pub fn optimize_block(
        &self,
        snapshot: &EvaluationDataset,
        block_id: usize,
        block: &[usize],
        iters: usize,
        first_index: usize,
        cycle: usize,
    ) -> Result<BlockResult> {
        if block.is_empty() {
            return Err(Error::Empty("block"));
        }
        let inc = snapshot.best().ok_or(Error::Empty("snapshot dataset"))?;
        let incumbent = inc.theta.clone();
        let mut local_best = (inc.theta.clone(), inc.y);
        let mut out = BlockResult {
            block_id,
            block: block.to_vec(),
            records: Vec::with_capacity(iters),
            ms: Vec::with_capacity(iters),
            shots: Vec::with_capacity(iters),
        };
        let (c, b) = (cycle as u64, block_id as u64);
        for k in 0..iters {
            let (x, y) = self.training_set(snapshot, &incumbent, block, &out.records);
            let t = y.len();
            let fit_seed = seed::stream_seed(self.cfg.seed, Stream::Forest, &[c, b, k as u64]);
            let model = self.cfg.surrogate.fit(x, &y, fit_seed)?;
            let domain = SearchBox {
                center: &local_best.0,
                block,
            };
            let prop_seed = seed::stream_seed(self.cfg.seed, Stream::Proposal, &[c, b, k as u64]);
            let theta = propose_next(
                model.as_ref(),
                &domain,
                &self.cfg.acquisition,
                local_best.1,
                t,
                prop_seed,
            )?;
            let obs = self.objective.evaluate(&theta, (first_index + k) as u64)?;
            out.ms.push(self.now_ms());
            out.shots.push(obs.shots);
            if obs.y < local_best.1 {
                local_best = (theta.clone(), obs.y);
            }
            out.records.push(Record {
                theta,
                y: obs.y,
                tag: Phase::Block(block_id),
                f_exact: obs.f_exact,
            });
        }
        Ok(out)
    }

    /// Merge block results into the shared state.
    ///
    /// All proposals are appended in block order. When two or more blocks beat
    /// the pre-cycle incumbent, their best block coordinates are composed onto
    /// the incumbent and evaluated once (if `allow_composed`). The incumbent is
    /// always the dataset minimum afterwards.
    pub fn synchronize(
        &self,
        state: &mut RunState,
        results: Vec<BlockResult>,
        allow_composed: bool,
    ) -> Result<()> {
        let (_, prev_best_y) = state.best();
        let prev_theta = state.dataset.records()[state.best().0].theta.clone();
        let mut improved: Vec<(usize, Vec<usize>, Vec<f64>)> = Vec::new();
        for res in results {
            let best = res
                .records
                .iter()
                .enumerate()
                .filter(|(_, r)| r.y < prev_best_y)
                .fold(None, |acc: Option<(usize, f64)>, (i, r)| match acc {
                    Some((_, y)) if y <= r.y => acc,
                    _ => Some((i, r.y)),
                });
            if let Some((i, _)) = best {
                improved.push((
                    res.block_id,
                    res.block.clone(),
                    res.records[i].theta.project(&res.block),
                ));
            }
            for ((r, ms), shots) in res.records.into_iter().zip(res.ms).zip(res.shots) {
                self.append(state, r, ms, shots)?;
            }
        }
        let mut composed_index = None;
        if allow_composed && improved.len() >= 2 {
            let mut theta = prev_theta;
            for (_, block, values) in &improved {
                theta = theta.with_block(block, values);
            }
            let index = state.dataset.len();
            let obs = self.objective.evaluate(&theta, index as u64)?;
            let ms = self.now_ms();
            self.append(
                state,
                Record {
                    theta,
                    y: obs.y,
                    tag: Phase::Composed,
                    f_exact: obs.f_exact,
                },
                ms,
                obs.shots,
            )?;
            composed_index = Some(index);
        }
        let (best_index, best_y) = state.best();
        state.events.push(Event::Sync {
            cycle: state.cycle,
            ms: self.now_ms(),
            improved_blocks: improved.iter().map(|(b, _, _)| *b).collect(),
            composed_index,
            best_index,
            best_y,
        });
        Ok(())
    }

    fn partition_for(&self, cycle: usize) -> Result<LayerPartition> {
        let d = self.objective.dim();
        match self.cfg.mode {
            Mode::Full => Ok(LayerPartition::single(d)),
            Mode::Layerwise => Ok(self.layers.clone()),
            Mode::RandomSubspace {
                block_size,
                reshuffle_each_cycle,
            } => {
                let key = if reshuffle_each_cycle { cycle as u64 } else { 0 };
                random_partition(
                    d,
                    block_size,
                    seed::stream_seed(self.cfg.seed, Stream::Partition, &[key]),
                )
            }
        }
    }

    /// One cycle: per-block optimization against a frozen snapshot, then sync.
    pub fn run_cycle(&self, state: &mut RunState) -> Result<()> {
        let partition = self.partition_for(state.cycle)?;
        if matches!(self.cfg.mode, Mode::RandomSubspace { .. }) {
            state.events.push(Event::Partition {
                cycle: state.cycle,
                blocks: partition.blocks().to_vec(),
            });
        }
        let mut left = self.budget_left(state);
        let mut jobs = Vec::new();
        let mut next_index = state.dataset.len();
        for (id, block) in partition.blocks().iter().enumerate() {
            let n = self.cfg.inner_iters.min(left);
            if n == 0 {
                break;
            }
            jobs.push((id, block.clone(), n, next_index));
            next_index += n;
            left -= n;
        }
        let snapshot = &state.dataset;
        let cycle = state.cycle;
        let results: Vec<Result<BlockResult>> = match self.cfg.execution {
            Execution::Sequential => jobs
                .iter()
                .map(|(id, block, n, first)| {
                    self.optimize_block(snapshot, *id, block, *n, *first, cycle)
                })
                .collect(),
            Execution::Concurrent => std::thread::scope(|s| {
                let handles: Vec<_> = jobs
                    .iter()
                    .map(|(id, block, n, first)| {
                        s.spawn(move || {
                            self.optimize_block(snapshot, *id, block, *n, *first, cycle)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("block worker panicked"))
                    .collect()
            }),
        };
        let results = results.into_iter().collect::<Result<Vec<_>>>()?;
        self.synchronize(state, results, left > 0)?;
        state.cycle += 1;
        let it = state.cycle;
        self.push_curve(state, it);
        Ok(())
    }

    pub fn run(&self) -> Result<RunResult> {
        let state = self.warm_up(RunState::new(self.objective.dim()))?;
        let warm_up_ms = self.now_ms();
        let mut state = state;
        loop {
            if self.cfg.cycles.is_some_and(|c| state.cycle >= c) || self.budget_left(&state) == 0 {
                break;
            }
            self.run_cycle(&mut state)?;
        }
        let total_ms = self.now_ms();
        let best = state.incumbent().expect("warm-up evaluates at least once").clone();
        Ok(RunResult {
            theta_best: best.theta,
            y_best: best.y,
            best_f_exact: best.f_exact,
            evaluations: state.dataset.len(),
            shots_used: state.shots_used,
            dataset: state.dataset,
            curve: state.curve,
            events: state.events,
            timings: PhaseTimings {
                warm_up_ms,
                optimize_ms: total_ms - warm_up_ms,
                total_ms,
            },
        })
    }
}

/// Full surrogate-guided preparation run of `spec` towards `target`.
pub fn run_surrogate_prep(
    target: &TargetSpec,
    spec: &AnsatzSpec,
    cfg: &RunConfig,
) -> Result<RunResult> {
    cfg.validate(spec.param_count())?;
    let objective = StatePrepObjective::new(
        target,
        spec,
        cfg.reference,
        cfg.shots,
        cfg.noise,
        cfg.seed,
    )?;
    Optimizer::new(&objective, cfg, LayerPartition::layerwise(spec))?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::GbrtParams;

    /// `Σ_i (1 − cos(θ_i − a_i))`, minimized at `a`.
    struct Separable {
        a: Vec<f64>,
    }

    impl Separable {
        fn term(&self, i: usize, v: f64) -> f64 {
            1.0 - (v - self.a[i]).cos()
        }
    }

    impl Objective for Separable {
        fn dim(&self) -> usize {
            self.a.len()
        }
        fn evaluate(&self, theta: &ParameterVector, _: u64) -> Result<crate::optimizer::Observation> {
            let y = theta
                .as_slice()
                .iter()
                .enumerate()
                .map(|(i, &v)| self.term(i, v))
                .sum();
            Ok(crate::optimizer::Observation {
                y,
                f_exact: Some(y),
                shots: 0,
            })
        }
    }

    fn cfg(mode: Mode) -> RunConfig {
        RunConfig {
            mode,
            max_evaluations: Some(40),
            n_init: Some(8),
            inner_iters: 3,
            deterministic: true,
            seed: 11,
            surrogate: crate::surrogate::SurrogateConfig::Gbrt(GbrtParams {
                n_trees: 20,
                ..GbrtParams::default()
            }),
            acquisition: crate::acquisition::AcquisitionConfig {
                n_candidates: 64,
                ..Default::default()
            },
            ..RunConfig::default()
        }
    }

    fn two_layers() -> LayerPartition {
        LayerPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap()
    }

    fn obj() -> Separable {
        Separable {
            a: vec![1.0, 2.0, 3.0, 4.0],
        }
    }

    #[test]
    fn zero_cycles_returns_warm_up_best() {
        let o = obj();
        let c = RunConfig {
            cycles: Some(0),
            ..cfg(Mode::Layerwise)
        };
        let r = Optimizer::new(&o, &c, two_layers()).unwrap().run().unwrap();
        assert_eq!(r.evaluations, 8);
        assert_eq!(r.dataset.len(), 8);
        let min = r.dataset.ys().into_iter().fold(f64::INFINITY, f64::min);
        assert_eq!(r.y_best, min);
    }

    #[test]
    fn single_warm_up_point() {
        let o = obj();
        let c = RunConfig {
            n_init: Some(1),
            ..cfg(Mode::Layerwise)
        };
        let opt = Optimizer::new(&o, &c, two_layers()).unwrap();
        let s = opt.warm_up(RunState::new(4)).unwrap();
        assert_eq!(s.dataset.len(), 1);
        assert_eq!(s.incumbent().unwrap(), &s.dataset.records()[0]);
    }

    #[test]
    fn proposals_stay_on_block() {
        let o = obj();
        let c = cfg(Mode::Layerwise);
        let opt = Optimizer::new(&o, &c, two_layers()).unwrap();
        let s = opt.warm_up(RunState::new(4)).unwrap();
        let inc = s.incumbent().unwrap().theta.clone();
        let res = opt.optimize_block(&s.dataset, 1, &[2, 3], 6, 8, 0).unwrap();
        assert_eq!(res.records.len(), 6);
        for r in &res.records {
            assert_eq!(r.theta.as_slice()[..2], inc.as_slice()[..2]);
            assert_eq!(r.tag, Phase::Block(1));
        }
        assert!(opt.optimize_block(&s.dataset, 0, &[], 1, 8, 0).is_err());
    }

    fn record(o: &Separable, theta: Vec<f64>, tag: Phase) -> Record {
        let theta = ParameterVector::new(theta);
        let y = o.evaluate(&theta, 0).unwrap().y;
        Record {
            theta,
            y,
            tag,
            f_exact: Some(y),
        }
    }

    fn state_at(o: &Separable, theta: Vec<f64>) -> RunState {
        let mut s = RunState::new(4);
        s.dataset.push(record(o, theta, Phase::WarmUp)).unwrap();
        s
    }

    fn result(block_id: usize, block: Vec<usize>, records: Vec<Record>) -> BlockResult {
        let n = records.len();
        BlockResult {
            block_id,
            block,
            records,
            ms: vec![0; n],
            shots: vec![0; n],
        }
    }

    #[test]
    fn sync_without_improvement_keeps_incumbent() {
        let o = obj();
        let c = cfg(Mode::Layerwise);
        let opt = Optimizer::new(&o, &c, two_layers()).unwrap();
        let mut s = state_at(&o, vec![1.0, 2.0, 3.0, 4.5]);
        let before = s.incumbent().unwrap().clone();
        let worse = record(&o, vec![0.0, 0.0, 3.0, 4.5], Phase::Block(0));
        opt.synchronize(&mut s, vec![result(0, vec![0, 1], vec![worse])], true)
            .unwrap();
        assert_eq!(s.dataset.len(), 2);
        assert_eq!(s.incumbent().unwrap(), &before);
    }

    #[test]
    fn sync_single_improvement_becomes_incumbent() {
        let o = obj();
        let c = cfg(Mode::Layerwise);
        let opt = Optimizer::new(&o, &c, two_layers()).unwrap();
        let mut s = state_at(&o, vec![0.0, 0.0, 0.0, 0.0]);
        let better = record(&o, vec![0.0, 0.0, 3.0, 4.0], Phase::Block(1));
        let worse = record(&o, vec![5.0, 5.0, 0.0, 0.0], Phase::Block(0));
        opt.synchronize(
            &mut s,
            vec![
                result(0, vec![0, 1], vec![worse]),
                result(1, vec![2, 3], vec![better.clone()]),
            ],
            true,
        )
        .unwrap();
        assert_eq!(s.dataset.len(), 3);
        assert_eq!(s.incumbent().unwrap(), &better);
    }

    #[test]
    fn sync_composes_separable_improvements() {
        let o = obj();
        let c = cfg(Mode::Layerwise);
        let opt = Optimizer::new(&o, &c, two_layers()).unwrap();
        let start = vec![0.0, 0.0, 0.0, 0.0];
        let mut s = state_at(&o, start.clone());
        let f0 = s.incumbent().unwrap().y;
        let b0 = record(&o, vec![1.0, 1.5, 0.0, 0.0], Phase::Block(0));
        let b1 = record(&o, vec![0.0, 0.0, 2.5, 4.0], Phase::Block(1));
        let gain = (f0 - b0.y) + (f0 - b1.y);
        opt.synchronize(
            &mut s,
            vec![
                result(0, vec![0, 1], vec![b0.clone()]),
                result(1, vec![2, 3], vec![b1.clone()]),
            ],
            true,
        )
        .unwrap();
        assert_eq!(s.dataset.len(), 4);
        let composed = &s.dataset.records()[3];
        assert_eq!(composed.tag, Phase::Composed);
        assert_eq!(composed.theta.as_slice(), &[1.0, 1.5, 2.5, 4.0]);
        assert!((composed.y - (f0 - gain)).abs() < 1e-12);
        assert_eq!(s.incumbent().unwrap(), composed);
        assert!(composed.y < b0.y.min(b1.y));
    }

    #[test]
    fn sync_skips_composition_without_budget() {
        let o = obj();
        let c = cfg(Mode::Layerwise);
        let opt = Optimizer::new(&o, &c, two_layers()).unwrap();
        let mut s = state_at(&o, vec![0.0; 4]);
        let b0 = record(&o, vec![1.0, 1.5, 0.0, 0.0], Phase::Block(0));
        let b1 = record(&o, vec![0.0, 0.0, 2.5, 4.0], Phase::Block(1));
        opt.synchronize(
            &mut s,
            vec![result(0, vec![0, 1], vec![b0]), result(1, vec![2, 3], vec![b1])],
            false,
        )
        .unwrap();
        assert_eq!(s.dataset.len(), 3);
    }

    fn trace(r: &RunResult) -> Vec<(Vec<f64>, f64, Phase)> {
        r.dataset
            .records()
            .iter()
            .map(|x| (x.theta.as_slice().to_vec(), x.y, x.tag))
            .collect()
    }

    #[test]
    fn concurrent_matches_sequential() {
        let o = obj();
        for mode in [
            Mode::Layerwise,
            Mode::RandomSubspace {
                block_size: 1,
                reshuffle_each_cycle: true,
            },
        ] {
            let a = cfg(mode);
            let b = RunConfig {
                execution: Execution::Sequential,
                ..a.clone()
            };
            let ra = Optimizer::new(&o, &a, two_layers()).unwrap().run().unwrap();
            let rb = Optimizer::new(&o, &b, two_layers()).unwrap().run().unwrap();
            assert_eq!(trace(&ra), trace(&rb));
            assert_eq!(ra.events, rb.events);
        }
    }

    #[test]
    fn single_layer_equals_full_mode() {
        let o = obj();
        let full = cfg(Mode::Full);
        let lw = cfg(Mode::Layerwise);
        let ra = Optimizer::new(&o, &full, LayerPartition::single(4))
            .unwrap()
            .run()
            .unwrap();
        let rb = Optimizer::new(&o, &lw, LayerPartition::single(4))
            .unwrap()
            .run()
            .unwrap();
        assert_eq!(trace(&ra), trace(&rb));
    }

    #[test]
    fn run_invariants() {
        let o = obj();
        for mode in [
            Mode::Full,
            Mode::Layerwise,
            Mode::RandomSubspace {
                block_size: 3,
                reshuffle_each_cycle: false,
            },
        ] {
            let c = cfg(mode);
            let r = Optimizer::new(&o, &c, two_layers()).unwrap().run().unwrap();
            assert_eq!(r.evaluations, 40);
            assert_eq!(r.evaluations, r.dataset.len());
            let evals = r
                .events
                .iter()
                .filter(|e| matches!(e, Event::Evaluation { .. }))
                .count();
            assert_eq!(evals, r.dataset.len());
            assert!(r.curve.windows(2).all(|w| w[1].best_y <= w[0].best_y));
            assert!(r.curve.windows(2).all(|w| w[1].iteration > w[0].iteration));
            let bsf = r.best_so_far();
            assert!(bsf.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(r.y_best, *bsf.last().unwrap());
            assert!(r.y_best < bsf[7]);
        }
    }

    #[test]
    fn cycle_limit_without_budget() {
        let o = obj();
        let c = RunConfig {
            max_evaluations: None,
            cycles: Some(2),
            ..cfg(Mode::Layerwise)
        };
        let r = Optimizer::new(&o, &c, two_layers()).unwrap().run().unwrap();
        assert!(r.evaluations >= 8 + 2 * 6 && r.evaluations <= 8 + 2 * 7);
    }

    #[test]
    fn invalid_layers_rejected() {
        let o = obj();
        let c = cfg(Mode::Layerwise);
        assert!(Optimizer::new(&o, &c, LayerPartition::single(3)).is_err());
    }
}
