use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::ParameterVector;
use crate::error::{Error, Result};

/// Where an evaluation came from.
///
/// Serialized as `warm_up`, `block:<id>`, or `composed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Phase {
    WarmUp,
    Block(usize),
    Composed,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::WarmUp => f.write_str("warm_up"),
            Phase::Block(b) => write!(f, "block:{b}"),
            Phase::Composed => f.write_str("composed"),
        }
    }
}

impl From<Phase> for String {
    fn from(p: Phase) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Phase {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        match s.as_str() {
            "warm_up" => Ok(Phase::WarmUp),
            "composed" => Ok(Phase::Composed),
            other => other
                .strip_prefix("block:")
                .and_then(|b| b.parse().ok())
                .map(Phase::Block)
                .ok_or_else(|| format!("unknown phase `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub theta: ParameterVector,
    /// Observed loss (shot-estimated and/or noise-injected).
    pub y: f64,
    pub tag: Phase,
    /// Noise-free loss at `theta`, kept for diagnostics only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_exact: Option<f64>,
}

/// Append-only log of evaluations; insertion order defines the time index.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvaluationDataset {
    dim: usize,
    records: Vec<Record>,
}

impl EvaluationDataset {
    pub fn new(dim: usize) -> Self {
        EvaluationDataset {
            dim,
            records: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn push(&mut self, record: Record) -> Result<()> {
        if record.theta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: record.theta.len(),
            });
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.y).collect()
    }

    /// Coordinates of every record restricted to `block`.
    pub fn features(&self, block: &[usize]) -> Vec<Vec<f64>> {
        self.records.iter().map(|r| r.theta.project(block)).collect()
    }

    /// Index of the lowest observed loss (earliest on ties).
    pub fn best_index(&self) -> Option<usize> {
        self.records
            .iter()
            .enumerate()
            .fold(None, |acc: Option<(usize, f64)>, (i, r)| match acc {
                Some((_, y)) if y <= r.y => acc,
                _ => Some((i, r.y)),
            })
            .map(|(i, _)| i)
    }

    pub fn best(&self) -> Option<&Record> {
        self.best_index().map(|i| &self.records[i])
    }

    /// Prefix of the first `t` records.
    pub fn prefix(&self, t: usize) -> EvaluationDataset {
        EvaluationDataset {
            dim: self.dim,
            records: self.records[..t.min(self.records.len())].to_vec(),
        }
    }
}
