//! Seeded generators for planted-structure test data.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::analogy::{AnalogyDataset, AnalogyQuestion};
use crate::dump::{DumpHeader, InMemoryDump, SentenceRecord};
use crate::probe::{TaggedCorpus, TaggedSentence};
use crate::scalar::Scalar;
use crate::store::{EmbeddingMatrix, Vocabulary};

fn gaussian(rng: &mut impl Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            scale * z
        })
        .collect()
}

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

fn matrix<T: Scalar>(words: Vec<String>, dim: usize, rows: &[Vec<f64>]) -> EmbeddingMatrix<T> {
    let vocab = Vocabulary::from_words(words).expect("generated words are unique");
    let values = rows.iter().flatten().map(|&x| T::of(x)).collect();
    EmbeddingMatrix::new(vocab, dim, values).expect("generated shape is consistent")
}

/// Embeddings for a `n_entities x n_relations` word grid where
/// `word(i, j) = entity_i + relation_j + noise`, and `n_questions` analogies
/// `word(i,j) : word(i,k) :: word(l,j) : word(l,k)` grouped by `k`.
pub fn planted_analogies<T: Scalar>(
    n_entities: usize,
    n_relations: usize,
    dim: usize,
    noise: f64,
    n_questions: usize,
    rng: &mut impl Rng,
) -> (EmbeddingMatrix<T>, AnalogyDataset) {
    assert!(n_entities >= 2 && n_relations >= 2);
    let scale = 1.0 / (dim as f64).sqrt();
    let entities: Vec<Vec<f64>> = (0..n_entities).map(|_| gaussian(rng, dim, scale)).collect();
    let relations: Vec<Vec<f64>> = (0..n_relations).map(|_| gaussian(rng, dim, scale)).collect();
    let name = |i: usize, j: usize| format!("e{i}_r{j}");
    let mut words = Vec::new();
    let mut rows = Vec::new();
    for (i, e) in entities.iter().enumerate() {
        for (j, r) in relations.iter().enumerate() {
            words.push(name(i, j));
            let n = gaussian(rng, dim, noise);
            rows.push((0..dim).map(|d| e[d] + r[d] + n[d]).collect());
        }
    }
    let mut by_target: Vec<Vec<AnalogyQuestion>> = vec![Vec::new(); n_relations];
    for _ in 0..n_questions {
        let i = rng.random_range(0..n_entities);
        let l = (i + rng.random_range(1..n_entities)) % n_entities;
        let j = rng.random_range(0..n_relations);
        let k = (j + rng.random_range(1..n_relations)) % n_relations;
        by_target[k].push(AnalogyQuestion::new(&name(i, j), &name(i, k), &name(l, j), &name(l, k)));
    }
    let categories = by_target
        .into_iter()
        .enumerate()
        .filter(|(_, q)| !q.is_empty())
        .map(|(k, questions)| (format!("to_r{k}"), questions));
    let dataset = AnalogyDataset::new(categories).expect("category names are unique");
    (matrix(words, dim, &rows), dataset)
}

/// How gold tags depend on the sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagRule {
    /// `class(w_t)`
    Lexical,
    /// `(class(w_t) + class(w_{t-1})) mod K`, with `class(w_{-1}) = 0`
    PreviousWord,
}

/// Tagging corpus over words `w0..w{n_words}` with `class(w_i) = i mod
/// n_tags`, plus random Gaussian embeddings of the given dimension.
pub fn tagging_corpus<T: Scalar>(
    n_sentences: usize,
    sentence_len: (usize, usize),
    n_words: usize,
    n_tags: usize,
    dim: usize,
    rule: TagRule,
    rng: &mut impl Rng,
) -> (TaggedCorpus, EmbeddingMatrix<T>) {
    let words: Vec<String> = (0..n_words).map(|i| format!("w{i}")).collect();
    let sentences = (0..n_sentences)
        .map(|_| {
            let len = rng.random_range(sentence_len.0..=sentence_len.1);
            let ids: Vec<usize> = (0..len).map(|_| rng.random_range(0..n_words)).collect();
            tagged_sentence(&ids, &words, n_tags, rule)
        })
        .collect();
    let rows: Vec<Vec<f64>> = (0..n_words).map(|_| gaussian(rng, dim, 1.0)).collect();
    (
        TaggedCorpus::new(sentences).expect("lengths agree"),
        matrix(words, dim, &rows),
    )
}

/// More sentences over the vocabulary of [`tagging_corpus`].
pub fn tagging_sentences(
    n_sentences: usize,
    sentence_len: (usize, usize),
    n_words: usize,
    n_tags: usize,
    rule: TagRule,
    rng: &mut impl Rng,
) -> TaggedCorpus {
    let words: Vec<String> = (0..n_words).map(|i| format!("w{i}")).collect();
    let sentences = (0..n_sentences)
        .map(|_| {
            let len = rng.random_range(sentence_len.0..=sentence_len.1);
            let ids: Vec<usize> = (0..len).map(|_| rng.random_range(0..n_words)).collect();
            tagged_sentence(&ids, &words, n_tags, rule)
        })
        .collect();
    TaggedCorpus::new(sentences).expect("lengths agree")
}

fn tagged_sentence(ids: &[usize], words: &[String], n_tags: usize, rule: TagRule) -> TaggedSentence {
    let tags = ids
        .iter()
        .enumerate()
        .map(|(t, &w)| {
            let tag = match rule {
                TagRule::Lexical => w % n_tags,
                TagRule::PreviousWord => {
                    let prev = if t == 0 { 0 } else { ids[t - 1] % n_tags };
                    (w % n_tags + prev) % n_tags
                }
            };
            format!("T{tag}")
        })
        .collect();
    TaggedSentence {
        words: ids.iter().map(|&i| words[i].clone()).collect(),
        tags,
    }
}

/// Topic corpus for distillation tests.
#[derive(Debug, Clone)]
pub struct TopicCorpus {
    pub dump: InMemoryDump,
    pub vocab: Vocabulary,
    /// Planted unit vectors, one per vocabulary word.
    pub truth: EmbeddingMatrix<f64>,
}

/// Every sentence draws its words from one topic. Word `t{k}_{i}` has the
/// planted vector `normalize(center_k + spread * z)` with `z ~ N(0, I/dim)`;
/// each occurrence is emitted as that vector plus `N(0, noise^2)` per
/// coordinate, split over one or two subwords that average back to it.
#[allow(clippy::too_many_arguments)]
pub fn topic_corpus(
    n_topics: usize,
    words_per_topic: usize,
    dim: usize,
    spread: f64,
    noise: f64,
    n_sentences: usize,
    sentence_len: usize,
    rng: &mut impl Rng,
) -> TopicCorpus {
    let scale = 1.0 / (dim as f64).sqrt();
    let mut words = Vec::new();
    let mut truth = Vec::new();
    for k in 0..n_topics {
        let center = unit(gaussian(rng, dim, 1.0));
        for i in 0..words_per_topic {
            words.push(format!("t{k}_{i}"));
            let z = gaussian(rng, dim, scale);
            truth.push(unit((0..dim).map(|d| center[d] + spread * z[d]).collect()));
        }
    }
    let mut records = Vec::with_capacity(n_sentences);
    for _ in 0..n_sentences {
        let k = rng.random_range(0..n_topics);
        let mut sent_words = Vec::with_capacity(sentence_len);
        let mut subwords: Vec<Vec<f32>> = Vec::new();
        let mut alignment = Vec::with_capacity(sentence_len);
        for _ in 0..sentence_len {
            let w = k * words_per_topic + rng.random_range(0..words_per_topic);
            sent_words.push(words[w].clone());
            let n = gaussian(rng, dim, noise);
            let v: Vec<f64> = (0..dim).map(|d| truth[w][d] + n[d]).collect();
            let start = subwords.len();
            if rng.random_bool(0.3) {
                // two pieces whose mean is v
                let off = gaussian(rng, dim, 0.1);
                subwords.push((0..dim).map(|d| (v[d] + off[d]) as f32).collect());
                subwords.push((0..dim).map(|d| (v[d] - off[d]) as f32).collect());
                alignment.push(vec![start, start + 1]);
            } else {
                subwords.push(v.iter().map(|&x| x as f32).collect());
                alignment.push(vec![start]);
            }
        }
        records.push(SentenceRecord::from_subwords(sent_words, &subwords, alignment).expect("well-formed record"));
    }
    let mut header = DumpHeader::new(dim, "synthetic-topics", "planted");
    header.sentences = Some(n_sentences as u64);
    let vocab = Vocabulary::from_words(words.clone()).expect("unique words");
    TopicCorpus {
        dump: InMemoryDump { header, records },
        vocab,
        truth: matrix(words, dim, &truth),
    }
}

/// Random well-formed dump: words drawn from `w0..w{n_words}`, one to three
/// subwords per word, occasionally an unaligned leading subword, and vector
/// entries spanning many magnitudes.
pub fn random_dump(n_records: usize, dim: usize, n_words: usize, rng: &mut impl Rng) -> InMemoryDump {
    let mut records = Vec::with_capacity(n_records);
    for _ in 0..n_records {
        let len = rng.random_range(1..=6);
        let mut words = Vec::with_capacity(len);
        let mut alignment = Vec::with_capacity(len);
        let mut n_sub = usize::from(rng.random_bool(0.2));
        for _ in 0..len {
            words.push(format!("w{}", rng.random_range(0..n_words)));
            let pieces = rng.random_range(1..=3);
            alignment.push((n_sub..n_sub + pieces).collect());
            n_sub += pieces;
        }
        let vectors = (0..n_sub * dim).map(|_| random_f32(rng)).collect();
        records.push(SentenceRecord::new(words, dim, vectors, alignment).expect("well-formed record"));
    }
    InMemoryDump {
        header: DumpHeader::new(dim, "random", "last"),
        records,
    }
}

/// Finite f32 with a random sign, mantissa and a wide exponent range.
pub fn random_f32<R: Rng + ?Sized>(rng: &mut R) -> f32 {
    match rng.random_range(0..10) {
        0 => 0.0,
        1 => f32::from_bits(rng.random_range(1..0x0080_0000)), // subnormal
        _ => {
            let mant: f32 = rng.random_range(1.0..2.0);
            let exp = rng.random_range(-30..30);
            let sign = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
            sign * mant * 2f32.powi(exp)
        }
    }
}
