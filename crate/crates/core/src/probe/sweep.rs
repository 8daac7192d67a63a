//! One probe per hidden size, with grid and per-epoch CSV output.

use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{evaluate_accuracy, train, Encoder, EpochMetrics, ProbeConfig, ProbeError, TaggedCorpus};
use crate::hashing::derive_seed_indexed;
use crate::scalar::Scalar;
use crate::store::EmbeddingMatrix;

#[derive(Debug, Clone)]
pub struct CorpusSplits {
    pub train: TaggedCorpus,
    pub dev: Option<TaggedCorpus>,
    pub test: TaggedCorpus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub hidden_size: usize,
    pub seed: u64,
    /// Test accuracy of the final-epoch model.
    pub final_test_accuracy: f64,
    /// Test accuracy of the best-dev model, when a dev split exists.
    pub best_dev_test_accuracy: Option<f64>,
    pub best_dev_epoch: Option<usize>,
    pub metrics: Vec<EpochMetrics>,
}

/// Cells in the order the hidden sizes were given. A failed cell keeps its
/// slot so completed neighbours survive.
#[derive(Debug)]
pub struct SweepResult {
    pub cells: Vec<(usize, Result<SweepCell, ProbeError>)>,
}

impl SweepResult {
    pub fn hidden_sizes(&self) -> Vec<usize> {
        self.cells.iter().map(|(h, _)| *h).collect()
    }

    pub fn completed(&self) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().filter_map(|(_, c)| c.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, &ProbeError)> {
        self.cells.iter().filter_map(|(h, c)| c.as_ref().err().map(|e| (*h, e)))
    }
}

/// Per-cell seed; depends only on the base seed and the hidden size.
pub fn cell_seed(seed: u64, hidden_size: usize) -> u64 {
    derive_seed_indexed(seed, "cell", hidden_size as u64)
}

fn run_cell<T: Scalar>(
    splits: &CorpusSplits,
    embeddings: &EmbeddingMatrix<T>,
    hidden_size: usize,
    cfg: &ProbeConfig,
) -> Result<SweepCell, ProbeError> {
    let seed = cell_seed(cfg.seed, hidden_size);
    let cell_cfg = ProbeConfig {
        hidden_size,
        seed,
        ..cfg.clone()
    };
    let out = train(&splits.train, splits.dev.as_ref(), embeddings, &cell_cfg)?;
    let mut enc = Encoder::new(embeddings, cfg.oov);
    let final_test_accuracy = evaluate_accuracy(&out.model, &splits.test, &mut enc)?;
    let best = match &out.best_dev {
        Some(b) => Some((evaluate_accuracy(&b.model, &splits.test, &mut enc)?, b.epoch)),
        None => None,
    };
    Ok(SweepCell {
        hidden_size,
        seed,
        final_test_accuracy,
        best_dev_test_accuracy: best.map(|b| b.0),
        best_dev_epoch: best.map(|b| b.1),
        metrics: out.metrics,
    })
}

/// Trains one probe per hidden size with otherwise identical settings.
/// `parallel` runs cells on the rayon pool; results do not depend on it.
pub fn sweep<T: Scalar>(
    splits: &CorpusSplits,
    embeddings: &EmbeddingMatrix<T>,
    hidden_sizes: &[usize],
    cfg: &ProbeConfig,
    parallel: bool,
) -> Result<SweepResult, ProbeError> {
    if hidden_sizes.is_empty() {
        return Err(ProbeError::Config("no hidden sizes given".into()));
    }
    let run = |&h: &usize| (h, run_cell(splits, embeddings, h, cfg));
    let cells = if parallel {
        hidden_sizes.par_iter().map(run).collect()
    } else {
        hidden_sizes.iter().map(run).collect()
    };
    Ok(SweepResult { cells })
}

/// Which test accuracy a grid reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridMetric {
    #[default]
    FinalEpoch,
    BestDev,
}

fn pick(cell: &SweepCell, metric: GridMetric) -> Option<f64> {
    match metric {
        GridMetric::FinalEpoch => Some(cell.final_test_accuracy),
        GridMetric::BestDev => cell.best_dev_test_accuracy,
    }
}

/// Accuracy grid in percent: one row per embedding, one column per hidden
/// size (taken from the first row). Missing cells are left empty.
pub fn grid_csv(rows: &[(&str, &SweepResult)], metric: GridMetric) -> String {
    let mut out = String::from("embedding");
    let sizes = rows.first().map(|r| r.1.hidden_sizes()).unwrap_or_default();
    for h in &sizes {
        write!(out, ",{h}").unwrap();
    }
    out.push('\n');
    for (name, result) in rows {
        out.push_str(name);
        for h in &sizes {
            out.push(',');
            let v = result
                .cells
                .iter()
                .find(|(hh, _)| hh == h)
                .and_then(|(_, c)| c.as_ref().ok())
                .and_then(|c| pick(c, metric));
            if let Some(v) = v {
                write!(out, "{:.2}", 100.0 * v).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// Long-format metrics: `hidden_size,epoch,split,loss,accuracy`, accuracies
/// as fractions. Test rows carry the last epoch, or the chosen epoch for
/// `test_best_dev`.
pub fn metrics_csv(result: &SweepResult) -> String {
    let mut out = String::from("hidden_size,epoch,split,loss,accuracy\n");
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for cell in result.completed() {
        let h = cell.hidden_size;
        for m in &cell.metrics {
            writeln!(out, "{h},{},train,{},", m.epoch, m.train_loss).unwrap();
            if m.dev_accuracy.is_some() {
                writeln!(out, "{h},{},dev,{},{}", m.epoch, opt(m.dev_loss), opt(m.dev_accuracy)).unwrap();
            }
        }
        writeln!(out, "{h},{},test,,{}", cell.metrics.len(), cell.final_test_accuracy).unwrap();
        if let (Some(e), Some(a)) = (cell.best_dev_epoch, cell.best_dev_test_accuracy) {
            writeln!(out, "{h},{e},test_best_dev,,{a}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(h: usize, acc: f64) -> SweepCell {
        SweepCell {
            hidden_size: h,
            seed: 0,
            final_test_accuracy: acc,
            best_dev_test_accuracy: None,
            best_dev_epoch: None,
            metrics: vec![EpochMetrics {
                epoch: 1,
                train_loss: 0.5,
                dev_loss: None,
                dev_accuracy: None,
            }],
        }
    }

    #[test]
    fn grid_layout() {
        let a = SweepResult {
            cells: vec![(4, Ok(cell(4, 0.9762))), (1, Err(ProbeError::EmptyCorpus)), (2, Ok(cell(2, 0.5)))],
        };
        let csv = grid_csv(&[("elmo", &a)], GridMetric::FinalEpoch);
        assert_eq!(csv, "embedding,4,1,2\nelmo,97.62,,50.00\n");
        assert_eq!(grid_csv(&[("elmo", &a)], GridMetric::BestDev), "embedding,4,1,2\nelmo,,,\n");
    }

    #[test]
    fn metrics_layout() {
        let a = SweepResult {
            cells: vec![(1, Ok(cell(1, 0.25)))],
        };
        assert_eq!(
            metrics_csv(&a),
            "hidden_size,epoch,split,loss,accuracy\n1,1,train,0.5,\n1,1,test,,0.25\n"
        );
    }

    #[test]
    fn cell_seeds_differ_by_size() {
        assert_ne!(cell_seed(7, 1), cell_seed(7, 2));
        assert_eq!(cell_seed(7, 64), cell_seed(7, 64));
    }
}
