//! CBOW-style distillation of static vectors against teacher context.
//!
//! For an occurrence of target `w`, the teacher vectors of the surrounding
//! window (excluding the target position) are mean-pooled into `c`, mapped
//! through a learned projection `h = P c`, and scored against the static
//! vectors with negative sampling:
//!
//! `loss = -log σ(h·v_w) - Σ_j log σ(-h·v_{n_j})`
//!
//! Updates are plain SGD with a learning rate decaying linearly to zero.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ExtractError, Extraction};
use crate::dump::{pool_subwords, PoolingMode, SentenceSource};
use crate::scalar::{dot, Scalar};
use crate::store::{EmbeddingMatrix, Vocabulary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct X2StaticConfig {
    /// Output dimension; the teacher dimension when unset.
    pub dim: Option<usize>,
    /// Context half-width in words.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr0: f64,
    /// Power applied to unigram counts for the noise distribution.
    pub neg_exponent: f64,
    pub min_count: u64,
    pub seed: u64,
}

impl Default for X2StaticConfig {
    fn default() -> Self {
        X2StaticConfig {
            dim: None,
            window: 5,
            negatives: 5,
            epochs: 5,
            lr0: 0.05,
            neg_exponent: 0.75,
            min_count: 5,
            seed: 0,
        }
    }
}

impl X2StaticConfig {
    pub fn validate(&self) -> Result<(), ExtractError> {
        let fail = |m: &str| Err(ExtractError::Config(m.to_owned()));
        if self.dim == Some(0) {
            return fail("dim must be positive");
        }
        if self.window == 0 {
            return fail("window must be at least 1");
        }
        if self.negatives == 0 {
            return fail("negatives must be at least 1");
        }
        if !(self.lr0 > 0.0 && self.lr0.is_finite()) {
            return fail("lr0 must be positive");
        }
        if !(self.neg_exponent > 0.0 && self.neg_exponent <= 1.0) {
            return fail("neg_exponent must be in (0, 1]");
        }
        if self.min_count == 0 {
            return fail("min_count must be at least 1");
        }
        Ok(())
    }
}

/// Learned parameters over the participating vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct X2StaticModel<T> {
    pub vocab: Vocabulary,
    pub dim: usize,
    pub teacher_dim: usize,
    /// `|vocab| x dim`, row-major.
    pub target: Vec<T>,
    /// `dim x teacher_dim`, row-major.
    pub projection: Vec<T>,
}

impl<T: Scalar> X2StaticModel<T> {
    /// Static vectors `~U(-0.5/dim, 0.5/dim)`; the projection starts as the
    /// identity when dimensions match, otherwise `~U(-1/√teacher_dim, ..)`.
    pub fn init(vocab: Vocabulary, dim: usize, teacher_dim: usize, rng: &mut impl Rng) -> Self {
        let r = 0.5 / dim as f64;
        let target = (0..vocab.len() * dim)
            .map(|_| T::of(rng.random_range(-r..r)))
            .collect();
        let projection = if dim == teacher_dim {
            (0..dim * dim)
                .map(|i| if i / dim == i % dim { T::one() } else { T::zero() })
                .collect()
        } else {
            let r = 1.0 / (teacher_dim as f64).sqrt();
            (0..dim * teacher_dim)
                .map(|_| T::of(rng.random_range(-r..r)))
                .collect()
        };
        X2StaticModel {
            vocab,
            dim,
            teacher_dim,
            target,
            projection,
        }
    }

    pub fn row(&self, w: usize) -> &[T] {
        &self.target[w * self.dim..(w + 1) * self.dim]
    }

    fn project(&self, context: &[T]) -> Vec<T> {
        self.projection
            .chunks_exact(self.teacher_dim)
            .map(|p| dot(p, context))
            .collect()
    }

    fn all_finite(&self) -> bool {
        self.target.iter().chain(&self.projection).all(|x| x.is_finite())
    }
}

/// Loss of one occurrence and the gradients of every parameter it touches.
#[derive(Debug, Clone, PartialEq)]
pub struct OccurrenceGrads<T> {
    pub loss: T,
    /// d loss / d v_target
    pub target: Vec<T>,
    /// d loss / d v_negative, one entry per element of `negatives`
    pub negatives: Vec<Vec<T>>,
    /// d loss / d P, `dim x teacher_dim`
    pub projection: Vec<T>,
}

fn sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// `-log σ(x)`, evaluated without overflow.
fn neg_log_sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

pub fn occurrence_loss<T: Scalar>(
    model: &X2StaticModel<T>,
    context: &[T],
    target: usize,
    negatives: &[usize],
) -> T {
    let h = model.project(context);
    negatives.iter().fold(neg_log_sigmoid(dot(&h, model.row(target))), |acc, &n| {
        acc + neg_log_sigmoid(-dot(&h, model.row(n)))
    })
}

pub fn occurrence_loss_and_grads<T: Scalar>(
    model: &X2StaticModel<T>,
    context: &[T],
    target: usize,
    negatives: &[usize],
) -> OccurrenceGrads<T> {
    let h = model.project(context);
    let v_w = model.row(target);
    let s_w = dot(&h, v_w);
    let mut loss = neg_log_sigmoid(s_w);
    let g_w = sigmoid(s_w) - T::one();
    let mut grad_h: Vec<T> = v_w.iter().map(|&v| g_w * v).collect();
    let grad_target = h.iter().map(|&x| g_w * x).collect();
    let mut grad_neg = Vec::with_capacity(negatives.len());
    for &n in negatives {
        let v_n = model.row(n);
        let s_n = dot(&h, v_n);
        loss += neg_log_sigmoid(-s_n);
        let g_n = sigmoid(s_n);
        for (gh, &v) in grad_h.iter_mut().zip(v_n) {
            *gh += g_n * v;
        }
        grad_neg.push(h.iter().map(|&x| g_n * x).collect());
    }
    let projection = grad_h
        .iter()
        .flat_map(|&g| context.iter().map(move |&c| g * c))
        .collect();
    OccurrenceGrads {
        loss,
        target: grad_target,
        negatives: grad_neg,
        projection,
    }
}

#[derive(Debug, Clone)]
pub struct X2StaticOutput<T> {
    pub model: X2StaticModel<T>,
    /// Static vectors over the full requested vocabulary; non-participating
    /// words get zero rows and are listed in `uncovered`.
    pub extraction: Extraction<T>,
    /// Mean occurrence loss of each epoch.
    pub epoch_losses: Vec<f64>,
    pub updates: u64,
}

/// Sentence-level teacher word vectors and the participating-vocab index of
/// each word.
fn sentence_view<T: Scalar>(
    rec: &crate::dump::SentenceRecord,
    lookup: &Vocabulary,
) -> Result<(Vec<Vec<T>>, Vec<Option<usize>>), ExtractError> {
    let n = rec.words().len();
    let mut vecs = Vec::with_capacity(n);
    for i in 0..n {
        vecs.push(pool_subwords::<T>(rec, i, PoolingMode::Mean)?);
    }
    let ids = rec.words().iter().map(|w| lookup.index_of(w)).collect();
    Ok((vecs, ids))
}

fn window_mean<T: Scalar>(vecs: &[Vec<T>], i: usize, window: usize, out: &mut [T]) -> bool {
    let lo = i.saturating_sub(window);
    let hi = (i + window).min(vecs.len() - 1);
    out.iter_mut().for_each(|x| *x = T::zero());
    let mut n = 0usize;
    for (j, v) in vecs.iter().enumerate().take(hi + 1).skip(lo) {
        if j == i {
            continue;
        }
        n += 1;
        for (o, &x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }
    if n == 0 {
        return false;
    }
    let n = T::from_usize(n).expect("window size fits the scalar type");
    out.iter_mut().for_each(|x| *x /= n);
    true
}

/// Trains static vectors for `vocab` words seen at least `min_count` times.
///
/// Makes one counting pass over `source`, then `epochs` training passes.
/// Single-threaded and fully determined by `cfg.seed`.
pub fn train_x2static<T: Scalar>(
    source: &dyn SentenceSource,
    vocab: &Vocabulary,
    cfg: &X2StaticConfig,
) -> Result<X2StaticOutput<T>, ExtractError> {
    cfg.validate()?;
    let teacher_dim = source.header().dim;
    let dim = cfg.dim.unwrap_or(teacher_dim);

    // counting pass
    let mut counts = vec![0u64; vocab.len()];
    let mut with_context = vec![0u64; vocab.len()];
    for rec in source.sentences()? {
        let rec = rec?;
        let has_context = rec.words().len() > 1;
        for w in rec.words().iter().filter_map(|w| vocab.index_of(w)) {
            counts[w] += 1;
            with_context[w] += u64::from(has_context);
        }
    }
    let participating: Vec<usize> = (0..vocab.len())
        .filter(|&w| counts[w] >= cfg.min_count)
        .collect();
    if participating.is_empty() {
        return Err(ExtractError::Config(format!(
            "no vocabulary word occurs at least {} times",
            cfg.min_count
        )));
    }
    let sub_vocab = Vocabulary::from_words(participating.iter().map(|&w| vocab.word(w)))?;
    let per_epoch: u64 = participating.iter().map(|&w| with_context[w]).sum();
    let total = per_epoch * cfg.epochs as u64;

    let noise = WeightedIndex::new(
        participating
            .iter()
            .map(|&w| (counts[w] as f64).powf(cfg.neg_exponent)),
    )
    .map_err(|e| ExtractError::Config(format!("noise distribution: {e}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = X2StaticModel::<T>::init(sub_vocab, dim, teacher_dim, &mut rng);

    let mut update: u64 = 0;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut context = vec![T::zero(); teacher_dim];
    let mut negatives = Vec::with_capacity(cfg.negatives);
    for _ in 0..cfg.epochs {
        let mut loss_sum = 0.0;
        let mut n_occ = 0u64;
        for rec in source.sentences()? {
            let rec = rec?;
            if rec.words().len() < 2 {
                continue;
            }
            let (vecs, ids) = sentence_view::<T>(&rec, &model.vocab)?;
            for (i, id) in ids.iter().enumerate() {
                let Some(w) = *id else { continue };
                if !window_mean(&vecs, i, cfg.window, &mut context) {
                    continue;
                }
                negatives.clear();
                for _ in 0..cfg.negatives {
                    let n = noise.sample(&mut rng);
                    if n != w {
                        negatives.push(n);
                    }
                }
                let lr = T::of(cfg.lr0 * (1.0 - update as f64 / total as f64));
                let g = occurrence_loss_and_grads(&model, &context, w, &negatives);
                if !g.loss.is_finite() {
                    return Err(ExtractError::Divergence { update });
                }
                loss_sum += g.loss.to_f64_lossless();
                n_occ += 1;

                apply(&mut model.target, w, dim, &g.target, lr);
                for (&n, gn) in negatives.iter().zip(&g.negatives) {
                    apply(&mut model.target, n, dim, gn, lr);
                }
                for (p, &gp) in model.projection.iter_mut().zip(&g.projection) {
                    *p -= lr * gp;
                }
                debug_assert!(model.all_finite(), "non-finite parameter after update {update}");
                update += 1;
            }
        }
        epoch_losses.push(if n_occ == 0 { 0.0 } else { loss_sum / n_occ as f64 });
    }
    if !model.all_finite() {
        return Err(ExtractError::Divergence { update });
    }

    let mut values = vec![T::zero(); vocab.len() * dim];
    for (row, &w) in participating.iter().enumerate() {
        values[w * dim..(w + 1) * dim].copy_from_slice(model.row(row));
    }
    let uncovered = (0..vocab.len())
        .filter(|&w| counts[w] < cfg.min_count)
        .map(|w| vocab.word(w).to_owned())
        .collect();
    Ok(X2StaticOutput {
        extraction: Extraction {
            matrix: EmbeddingMatrix::new(vocab.clone(), dim, values)?,
            uncovered,
        },
        model,
        epoch_losses,
        updates: update,
    })
}

fn apply<T: Scalar>(target: &mut [T], row: usize, dim: usize, grad: &[T], lr: T) {
    for (p, &g) in target[row * dim..(row + 1) * dim].iter_mut().zip(grad) {
        *p -= lr * g;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_model() -> X2StaticModel<f64> {
        let vocab = Vocabulary::from_words(["a", "b", "c"]).unwrap();
        X2StaticModel {
            vocab,
            dim: 2,
            teacher_dim: 2,
            target: vec![0.0; 6],
            projection: vec![1.0, 0.0, 0.0, 1.0],
        }
    }

    #[test]
    fn target_gradient_at_zero_score() {
        // h = (1, 0), v_w = 0: σ(0) = 0.5, gradient = -0.5 h
        let g = occurrence_loss_and_grads(&toy_model(), &[1.0, 0.0], 0, &[]);
        assert_eq!(g.target, [-0.5, 0.0]);
        assert!((g.loss - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn stable_log_sigmoid() {
        assert!(neg_log_sigmoid(-800.0f64).is_finite());
        assert!((neg_log_sigmoid(-800.0f64) - 800.0).abs() < 1e-9);
        assert_eq!(neg_log_sigmoid(800.0f64), 0.0);
        assert!((sigmoid(0.0f32) - 0.5).abs() < 1e-7);
    }

    #[test]
    fn config_validation() {
        assert!(X2StaticConfig::default().validate().is_ok());
        for bad in [
            X2StaticConfig { window: 0, ..Default::default() },
            X2StaticConfig { negatives: 0, ..Default::default() },
            X2StaticConfig { lr0: 0.0, ..Default::default() },
            X2StaticConfig { neg_exponent: 1.5, ..Default::default() },
            X2StaticConfig { neg_exponent: 0.0, ..Default::default() },
            X2StaticConfig { dim: Some(0), ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(ExtractError::Config(_))), "{bad:?}");
        }
    }

    #[test]
    fn window_mean_excludes_center() {
        let vecs = vec![vec![1.0f64], vec![100.0], vec![3.0], vec![50.0]];
        let mut out = [0.0];
        assert!(window_mean(&vecs, 1, 1, &mut out));
        assert_eq!(out, [2.0]);
        assert!(window_mean(&vecs, 0, 1, &mut out));
        assert_eq!(out, [100.0]);
        assert!(!window_mean(&vecs[..1], 0, 3, &mut out));
    }
}
