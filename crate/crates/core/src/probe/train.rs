//! Mini-batch training of the tagging probe over frozen embeddings.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{AdamConfig, ProbeError, ProbeModel, ProbeOptimizer, SequenceExample, TaggedCorpus};
use crate::hashing::derive_seed;
use crate::scalar::Scalar;
use crate::store::{EmbeddingMatrix, OovPolicy};

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    /// Hidden units per direction.
    pub hidden_size: usize,
    pub dropout: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub oov: OovPolicy,
    pub seed: u64,
    /// Longer sentences are cut into consecutive chunks of at most this many tokens.
    pub max_len: usize,
    /// Expected embedding dimension; checked against the matrix when set.
    pub input_dim: Option<usize>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            hidden_size: 16,
            dropout: 0.5,
            epochs: 5,
            batch_size: 32,
            adam: AdamConfig::default(),
            oov: OovPolicy::default(),
            seed: 0,
            max_len: 512,
            input_dim: None,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<(), ProbeError> {
        let fail = |m: &str| Err(ProbeError::Config(m.to_owned()));
        if self.hidden_size == 0 {
            return fail("hidden_size must be positive");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return fail("dropout must lie in [0, 1)");
        }
        if self.batch_size == 0 {
            return fail("batch_size must be positive");
        }
        if self.max_len == 0 {
            return fail("max_len must be positive");
        }
        let a = &self.adam;
        if !(a.lr > 0.0 && (0.0..1.0).contains(&a.beta1) && (0.0..1.0).contains(&a.beta2) && a.eps > 0.0) {
            return fail("adam settings out of range");
        }
        Ok(())
    }
}

/// Word-to-row resolver. Out-of-vocabulary rows are drawn once per word
/// and reused for the lifetime of the encoder.
pub struct Encoder<'a, T> {
    embeddings: &'a EmbeddingMatrix<T>,
    oov: OovPolicy,
    cache: HashMap<String, Vec<T>>,
}

impl<'a, T: Scalar> Encoder<'a, T> {
    pub fn new(embeddings: &'a EmbeddingMatrix<T>, oov: OovPolicy) -> Self {
        Encoder {
            embeddings,
            oov,
            cache: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.embeddings.dim()
    }

    /// Number of distinct out-of-vocabulary words seen so far.
    pub fn n_oov(&self) -> usize {
        self.cache.len()
    }

    pub fn append_row(&mut self, word: &str, out: &mut Vec<T>) {
        if let Some(row) = self.embeddings.get(word) {
            out.extend_from_slice(row);
            return;
        }
        let row = self
            .cache
            .entry(word.to_owned())
            .or_insert_with(|| self.embeddings.lookup_or_oov(word, &self.oov).into_owned());
        out.extend_from_slice(row);
    }

    pub fn encode(&mut self, words: &[String]) -> Vec<T> {
        let mut out = Vec::with_capacity(words.len() * self.dim());
        for w in words {
            self.append_row(w, &mut out);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochMetrics {
    /// 1-based epoch number.
    pub epoch: usize,
    /// Token-weighted mean training loss, dropout on.
    pub train_loss: f64,
    /// Mean loss on dev tokens whose tag the model knows.
    pub dev_loss: Option<f64>,
    pub dev_accuracy: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BestDev<T> {
    pub epoch: usize,
    pub accuracy: f64,
    pub model: ProbeModel<T>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    /// Parameters after the last epoch.
    pub model: ProbeModel<T>,
    /// Earliest epoch with the highest dev accuracy, when a dev corpus was given.
    pub best_dev: Option<BestDev<T>>,
    pub metrics: Vec<EpochMetrics>,
}

/// Encoded sentence chunk: inputs (`len x D`) and tag ids, `None` for tags
/// unknown to the model.
struct Encoded<T> {
    inputs: Vec<T>,
    tags: Vec<Option<usize>>,
}

fn encode_corpus<T: Scalar>(
    corpus: &TaggedCorpus,
    tagset: &[String],
    encoder: &mut Encoder<'_, T>,
    max_len: usize,
) -> Vec<Encoded<T>> {
    let index: HashMap<&str, usize> = tagset.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    let mut out = Vec::new();
    for s in corpus.sentences() {
        for (words, tags) in s.words.chunks(max_len).zip(s.tags.chunks(max_len)) {
            out.push(Encoded {
                inputs: encoder.encode(words),
                tags: tags.iter().map(|t| index.get(t.as_str()).copied()).collect(),
            });
        }
    }
    out
}

/// Token accuracy and mean loss (over tokens with a known tag).
fn score<T: Scalar>(model: &ProbeModel<T>, data: &[Encoded<T>]) -> Result<(f64, Option<f64>), ProbeError> {
    let k = model.n_tags();
    let (mut correct, mut total) = (0usize, 0usize);
    let (mut loss, mut scored) = (0.0f64, 0usize);
    for ex in data {
        let probs = model.forward(&ex.inputs, None)?;
        for (row, gold) in probs.chunks_exact(k).zip(&ex.tags) {
            total += 1;
            let Some(g) = *gold else { continue };
            let best = argmax(row);
            correct += usize::from(best == g);
            loss -= row[g].to_f64_lossless().max(f64::MIN_POSITIVE).ln();
            scored += 1;
        }
    }
    let acc = if total == 0 { 0.0 } else { correct as f64 / total as f64 };
    let loss = (scored > 0).then(|| loss / scored as f64);
    Ok((acc, loss))
}

fn argmax<T: Scalar>(row: &[T]) -> usize {
    let mut best = 0;
    for (i, &p) in row.iter().enumerate() {
        if p > row[best] {
            best = i;
        }
    }
    best
}

/// Token-level accuracy with dropout off; every token counts, including
/// ones whose gold tag the model has never seen. An empty corpus scores 0.
pub fn evaluate_accuracy<T: Scalar>(
    model: &ProbeModel<T>,
    corpus: &TaggedCorpus,
    encoder: &mut Encoder<'_, T>,
) -> Result<f64, ProbeError> {
    if encoder.dim() != model.input_dim {
        return Err(ProbeError::Shape {
            expected: model.input_dim,
            found: encoder.dim(),
        });
    }
    let data = encode_corpus(corpus, &model.tagset, encoder, usize::MAX);
    Ok(score(model, &data)?.0)
}

fn pad_batch<T: Scalar>(batch: &[&Encoded<T>], dim: usize) -> Vec<SequenceExample<T>> {
    let max = batch.iter().map(|e| e.tags.len()).max().unwrap_or(0);
    batch
        .iter()
        .map(|e| {
            let mut inputs = e.inputs.clone();
            inputs.resize(max * dim, T::zero());
            let mut tags = e.tags.clone();
            tags.resize(max, None);
            SequenceExample { inputs, tags }
        })
        .collect()
}

/// Trains a fresh probe on `train`, scoring `dev` after every epoch.
///
/// The embedding matrix is only read. Initialization, batch order and
/// dropout each draw from their own stream derived from `cfg.seed`.
pub fn train<T: Scalar>(
    train: &TaggedCorpus,
    dev: Option<&TaggedCorpus>,
    embeddings: &EmbeddingMatrix<T>,
    cfg: &ProbeConfig,
) -> Result<TrainOutcome<T>, ProbeError> {
    cfg.validate()?;
    if let Some(d) = cfg.input_dim {
        if d != embeddings.dim() {
            return Err(ProbeError::Config(format!(
                "configured input_dim {d} but embeddings have dimension {}",
                embeddings.dim()
            )));
        }
    }
    if train.n_tokens() == 0 {
        return Err(ProbeError::EmptyCorpus);
    }
    let dim = embeddings.dim();
    let tagset = train.tagset().to_vec();
    let mut encoder = Encoder::new(embeddings, cfg.oov);
    let train_data: Vec<Encoded<T>> = encode_corpus(train, &tagset, &mut encoder, cfg.max_len)
        .into_iter()
        .filter(|e| !e.tags.is_empty())
        .collect();
    let dev_data = dev.map(|d| encode_corpus(d, &tagset, &mut encoder, cfg.max_len));

    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "init"));
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "shuffle"));
    let mut dropout_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "dropout"));
    let mut model = ProbeModel::new(dim, cfg.hidden_size, tagset, &mut init_rng);
    let mut opt = ProbeOptimizer::new(&model.params, cfg.adam);

    let mut metrics = Vec::with_capacity(cfg.epochs);
    let mut best_dev: Option<BestDev<T>> = None;
    let mut order: Vec<usize> = (0..train_data.len()).collect();
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let (mut loss_sum, mut tokens) = (0.0f64, 0usize);
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&Encoded<T>> = chunk.iter().map(|&i| &train_data[i]).collect();
            let n: usize = batch.iter().map(|e| e.tags.len()).sum();
            let padded = pad_batch(&batch, dim);
            let (loss, grads) = model.loss_and_grads(&padded, cfg.dropout, &mut dropout_rng)?;
            if !loss.is_finite() {
                return Err(ProbeError::Divergence {
                    step: opt.steps_taken() + 1,
                });
            }
            opt.step(&mut model.params, &grads)?;
            loss_sum += loss.to_f64_lossless() * n as f64;
            tokens += n;
        }
        let (dev_accuracy, dev_loss) = match &dev_data {
            Some(d) => {
                let (acc, loss) = score(&model, d)?;
                (Some(acc), loss)
            }
            None => (None, None),
        };
        if let Some(acc) = dev_accuracy {
            if best_dev.as_ref().is_none_or(|b| acc > b.accuracy) {
                best_dev = Some(BestDev {
                    epoch,
                    accuracy: acc,
                    model: model.clone(),
                });
            }
        }
        metrics.push(EpochMetrics {
            epoch,
            train_loss: loss_sum / tokens as f64,
            dev_loss,
            dev_accuracy,
        });
    }
    debug_assert!(model.params.all_finite());
    Ok(TrainOutcome {
        model,
        best_dev,
        metrics,
    })
}
