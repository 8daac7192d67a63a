//! Reference implementations written independently of the library code,
//! straight from the textbook definitions and in plain loops.

#![allow(dead_code)]

use embedprobe::probe::ProbeModel;
use embedprobe::EmbeddingMatrix;

/// Exhaustive 3CosAdd: normalize every row, score all candidates except
/// `a`, `b`, `c` by cosine against `b - a + c`, sort by (score desc,
/// index asc) and cut at `k`.
pub fn brute_force_top_k(m: &EmbeddingMatrix<f64>, a: usize, b: usize, c: usize, k: usize) -> Vec<usize> {
    let unit: Vec<Vec<f64>> = (0..m.len())
        .map(|i| {
            let row = m.values()[i * m.dim()..(i + 1) * m.dim()].to_vec();
            let n = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            row.into_iter().map(|x| if n > 0.0 { x / n } else { 0.0 }).collect()
        })
        .collect();
    let q: Vec<f64> = (0..m.dim()).map(|d| unit[b][d] - unit[a][d] + unit[c][d]).collect();
    let mut scored: Vec<(f64, usize)> = (0..m.len())
        .filter(|&i| i != a && i != b && i != c)
        .map(|i| (q.iter().zip(&unit[i]).map(|(x, y)| x * y).sum::<f64>(), i))
        .collect();
    scored.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));
    scored.into_iter().take(k).map(|(_, i)| i).collect()
}

/// Mean reciprocal rank straight from the definition: 1/rank if ranked
/// within `k`, else 0, averaged over questions.
pub fn mrr_by_definition(ranks: &[Option<usize>], k: usize) -> f64 {
    let total: f64 = ranks
        .iter()
        .map(|r| match r {
            Some(r) if *r >= 1 && *r <= k => 1.0 / *r as f64,
            _ => 0.0,
        })
        .sum();
    total / ranks.len() as f64
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Step-by-step BiLSTM forward pass with named gate matrices, no dropout.
pub fn naive_probe_forward(model: &ProbeModel<f64>, inputs: &[f64]) -> Vec<Vec<f64>> {
    let d = model.input_dim;
    let h = model.hidden;
    let k = model.tagset.len();
    let len = inputs.len() / d;
    let x = |t: usize, j: usize| inputs[t * d + j];

    let run = |weights: &[f64], bias: &[f64], order: Vec<usize>| -> Vec<Vec<f64>> {
        // gate g in {0: input, 1: forget, 2: cell, 3: output}, unit u
        let w = |g: usize, u: usize, col: usize| weights[(g * h + u) * (d + h) + col];
        let bb = |g: usize, u: usize| bias[g * h + u];
        let mut hs = vec![vec![0.0; h]; len];
        let mut hprev = vec![0.0; h];
        let mut cprev = vec![0.0; h];
        for t in order {
            let mut hnew = vec![0.0; h];
            let mut cnew = vec![0.0; h];
            for u in 0..h {
                let mut pre = [0.0; 4];
                for (g, p) in pre.iter_mut().enumerate() {
                    let mut s = bb(g, u);
                    for j in 0..d {
                        s += w(g, u, j) * x(t, j);
                    }
                    for j in 0..h {
                        s += w(g, u, d + j) * hprev[j];
                    }
                    *p = s;
                }
                let i = sigmoid(pre[0]);
                let f = sigmoid(pre[1]);
                let c_hat = pre[2].tanh();
                let o = sigmoid(pre[3]);
                cnew[u] = f * cprev[u] + i * c_hat;
                hnew[u] = o * cnew[u].tanh();
            }
            hs[t] = hnew.clone();
            hprev = hnew;
            cprev = cnew;
        }
        hs
    };
    let p = &model.params;
    let fwd = run(&p.forward.weights, &p.forward.bias, (0..len).collect());
    let bwd = run(&p.backward.weights, &p.backward.bias, (0..len).rev().collect());
    (0..len)
        .map(|t| {
            let feat: Vec<f64> = fwd[t].iter().chain(&bwd[t]).copied().collect();
            let logits: Vec<f64> = (0..k)
                .map(|r| p.out_bias[r] + (0..2 * h).map(|j| p.out_weights[r * 2 * h + j] * feat[j]).sum::<f64>())
                .collect();
            let z: f64 = logits.iter().map(|l| l.exp()).sum();
            logits.iter().map(|l| l.exp() / z).collect()
        })
        .collect()
}

/// Relative difference with a floor on the denominator so that coordinates
/// whose true gradient is essentially zero are judged on absolute error.
pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// Central difference of `f` along coordinate `i` of `x`.
pub fn central_difference(x: &mut [f64], i: usize, h: f64, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let orig = x[i];
    x[i] = orig + h;
    let plus = f(x);
    x[i] = orig - h;
    let minus = f(x);
    x[i] = orig;
    (plus - minus) / (2.0 * h)
}

/// Two-pass mean: sum everything, then divide.
pub fn two_pass_mean(rows: &[Vec<f64>]) -> Vec<f64> {
    let dim = rows[0].len();
    let mut sum = vec![0.0f64; dim];
    for r in rows {
        for (s, x) in sum.iter_mut().zip(r) {
            *s += x;
        }
    }
    sum.into_iter().map(|s| s / rows.len() as f64).collect()
}

/// Mean of the listed subword rows of a flat `n x dim` f32 buffer,
/// accumulated in f64.
pub fn mean_of_subwords(vectors: &[f32], dim: usize, idx: &[usize]) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| vectors[i * dim..(i + 1) * dim].iter().map(|&x| x as f64).collect())
        .collect();
    two_pass_mean(&rows)
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

pub const TREND_SIZES: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];

/// Word-determined tags over 50 words and 8 tags in 32 dimensions, with
/// 400/100/100 train/dev/test sentences.
pub fn trend_setup(seed: u64) -> (embedprobe::probe::CorpusSplits, EmbeddingMatrix<f64>) {
    use embedprobe::synthetic::{tagging_corpus, tagging_sentences, TagRule};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (train, emb) = tagging_corpus(400, (5, 15), 50, 8, 32, TagRule::Lexical, &mut rng);
    let dev = tagging_sentences(100, (5, 15), 50, 8, TagRule::Lexical, &mut rng);
    let test = tagging_sentences(100, (5, 15), 50, 8, TagRule::Lexical, &mut rng);
    (embedprobe::probe::CorpusSplits { train, dev: Some(dev), test }, emb)
}

/// Spearman correlation between hidden size and final test accuracy for
/// one sweep under the default probe configuration.
pub fn trend_correlation(seed: u64) -> (f64, Vec<f64>) {
    use embedprobe::probe::{spearman, sweep, ProbeConfig};
    let (splits, emb) = trend_setup(seed);
    let cfg = ProbeConfig { seed, ..ProbeConfig::default() };
    let result = sweep(&splits, &emb, &TREND_SIZES, &cfg, true).unwrap();
    let accs: Vec<f64> = result.completed().map(|c| c.final_test_accuracy).collect();
    assert_eq!(accs.len(), TREND_SIZES.len());
    let xs: Vec<f64> = TREND_SIZES.iter().map(|&s| s as f64).collect();
    (spearman(&xs, &accs), accs)
}

/// Threshold on Spearman's rho for every seed of the trend check.
pub const TREND_THRESHOLD: f64 = 0.8;
