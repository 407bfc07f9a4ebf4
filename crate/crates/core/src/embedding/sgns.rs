//! Skip-gram with negative sampling.
//!
//! The trainer follows the reference word2vec recipe: unigram^0.75 noise
//! distribution, frequent-word subsampling, a context radius drawn uniformly
//! from `1..=window` per center word and a learning rate decaying linearly to
//! `1e-4` of its initial value. Context windows never cross document
//! boundaries.
//!
//! With `threads > 1` workers update the shared weights without locking
//! (lossy "Hogwild" updates through relaxed atomics); only the single-threaded
//! mode is reproducible bit for bit.

use std::cell::Cell;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EmbeddingTable;
use crate::corpus::{count_frequencies, TaggedCorpus};
use crate::error::{Error, Result};

const NOISE_POWER: f64 = 0.75;
const MIN_LR_FRACTION: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct SgnsConfig {
    pub dim: usize,
    /// Maximum context radius.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_learning_rate: f64,
    pub min_count: u64,
    /// Subsampling threshold; `0` disables subsampling.
    pub subsample_threshold: f64,
    pub rng_seed: u64,
    pub threads: usize,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_learning_rate: 0.025,
            min_count: 5,
            subsample_threshold: 1e-3,
            rng_seed: 1,
            threads: 1,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dim", self.dim),
            ("window", self.window),
            ("negatives", self.negatives),
            ("epochs", self.epochs),
            ("min_count", self.min_count as usize),
            ("threads", self.threads),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if !(self.initial_learning_rate > 0.0 && self.initial_learning_rate < 1.0) {
            return Err(Error::Config("initial learning rate must lie in (0, 1)".into()));
        }
        if !(self.subsample_threshold >= 0.0 && self.subsample_threshold.is_finite()) {
            return Err(Error::Config("subsample threshold must be non-negative".into()));
        }
        Ok(())
    }

    fn describe(&self) -> Vec<(String, String)> {
        vec![
            ("model".into(), "sgns".into()),
            ("dim".into(), self.dim.to_string()),
            ("window".into(), self.window.to_string()),
            ("negatives".into(), self.negatives.to_string()),
            ("epochs".into(), self.epochs.to_string()),
            ("initial_learning_rate".into(), self.initial_learning_rate.to_string()),
            ("min_count".into(), self.min_count.to_string()),
            ("subsample_threshold".into(), self.subsample_threshold.to_string()),
            ("rng_seed".into(), self.rng_seed.to_string()),
            ("threads".into(), self.threads.to_string()),
        ]
    }
}

/// One training example: a center word, an observed context word and the
/// sampled noise words, all as row indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SgnsSample {
    pub center: usize,
    pub context: usize,
    pub negatives: Vec<usize>,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Negative-sampling loss of one sample:
/// `-ln σ(u_o·v_c) - Σ_k ln σ(-u_k·v_c)` with `v` rows of `input` and `u`
/// rows of `output` (both row-major with `dim` columns).
pub fn sgns_loss(input: &[f64], output: &[f64], dim: usize, sample: &SgnsSample) -> f64 {
    let v = &input[sample.center * dim..(sample.center + 1) * dim];
    let score = |row: usize| -> f64 { super::dot(v, &output[row * dim..(row + 1) * dim]) };
    let mut loss = -sigmoid(score(sample.context)).ln();
    for &k in &sample.negatives {
        loss -= sigmoid(-score(k)).ln();
    }
    loss
}

/// One stochastic gradient step on `sgns_loss` with learning rate `lr`.
/// This is the update the trainer applies; noise words equal to the context
/// word are skipped.
pub fn sgns_step(input: &mut [f64], output: &mut [f64], dim: usize, sample: &SgnsSample, lr: f64) {
    let input = Cell::from_mut(input).as_slice_of_cells();
    let output = Cell::from_mut(output).as_slice_of_cells();
    let mut scratch = vec![0.0; dim];
    update_pair(
        input,
        output,
        dim,
        sample.center,
        sample.context,
        sample.negatives.iter().copied(),
        lr,
        &mut scratch,
    );
}

/// A scalar weight that may be shared between workers.
trait Slot {
    fn get(&self) -> f64;
    fn set(&self, v: f64);
}

impl Slot for Cell<f64> {
    #[inline(always)]
    fn get(&self) -> f64 {
        Cell::get(self)
    }
    #[inline(always)]
    fn set(&self, v: f64) {
        Cell::set(self, v)
    }
}

struct SharedF64(AtomicU64);

impl Slot for SharedF64 {
    #[inline(always)]
    fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }
    #[inline(always)]
    fn set(&self, v: f64) {
        self.0.store(v.to_bits(), Ordering::Relaxed)
    }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn update_pair<S: Slot>(
    input: &[S],
    output: &[S],
    dim: usize,
    center: usize,
    context: usize,
    negatives: impl Iterator<Item = usize>,
    lr: f64,
    grad: &mut [f64],
) {
    let v = &input[center * dim..(center + 1) * dim];
    grad.iter_mut().for_each(|g| *g = 0.0);
    let targets = std::iter::once((context, 1.0)).chain(negatives.filter(|&k| k != context).map(|k| (k, 0.0)));
    for (target, label) in targets {
        let u = &output[target * dim..(target + 1) * dim];
        let f: f64 = v.iter().zip(u).map(|(a, b)| a.get() * b.get()).sum();
        let g = (label - sigmoid(f)) * lr;
        for ((acc, vi), ui) in grad.iter_mut().zip(v).zip(u) {
            let uv = ui.get();
            *acc += g * uv;
            ui.set(uv + g * vi.get());
        }
    }
    for (vi, g) in v.iter().zip(grad.iter()) {
        vi.set(vi.get() + g);
    }
}

struct Prepared {
    words: Vec<String>,
    counts: Vec<u64>,
    docs: Vec<Vec<u32>>,
    train_words: usize,
    noise: WeightedIndex<f64>,
}

fn prepare(corpus: &TaggedCorpus, config: &SgnsConfig) -> Result<Prepared> {
    if corpus.is_empty() {
        return Err(Error::EmptyInput("training corpus has no documents".into()));
    }
    let freq = count_frequencies(corpus);
    let mut vocab: Vec<(&String, u64)> = freq
        .counts
        .iter()
        .filter(|(_, &c)| c >= config.min_count)
        .map(|(w, &c)| (w, c))
        .collect();
    if vocab.is_empty() {
        return Err(Error::Config(format!(
            "no word occurs at least {} times; vocabulary would be empty",
            config.min_count
        )));
    }
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let index: std::collections::HashMap<&str, u32> =
        vocab.iter().enumerate().map(|(i, (w, _))| (w.as_str(), i as u32)).collect();
    let docs: Vec<Vec<u32>> = corpus
        .documents
        .iter()
        .map(|d| d.words().filter_map(|w| index.get(w).copied()).collect::<Vec<_>>())
        .filter(|d| !d.is_empty())
        .collect();
    let train_words = docs.iter().map(Vec::len).sum();
    let counts: Vec<u64> = vocab.iter().map(|(_, c)| *c).collect();
    let noise = WeightedIndex::new(counts.iter().map(|&c| (c as f64).powf(NOISE_POWER)))
        .map_err(|e| Error::Config(format!("noise distribution: {e}")))?;
    Ok(Prepared {
        words: vocab.iter().map(|(w, _)| (*w).clone()).collect(),
        counts,
        docs,
        train_words,
        noise,
    })
}

/// Keep probabilities under the word2vec subsampling formula
/// `(sqrt(c / (t·N)) + 1) · t·N / c`, capped at 1.
fn keep_probabilities(counts: &[u64], train_words: usize, threshold: f64) -> Vec<f64> {
    if threshold == 0.0 {
        return vec![1.0; counts.len()];
    }
    let tn = threshold * train_words as f64;
    counts
        .iter()
        .map(|&c| {
            let c = c as f64;
            (((c / tn).sqrt() + 1.0) * tn / c).min(1.0)
        })
        .collect()
}

struct Schedule {
    initial: f64,
    planned: f64,
}

impl Schedule {
    fn rate(&self, processed: usize) -> f64 {
        let r = self.initial * (1.0 - processed as f64 / (self.planned + 1.0));
        r.max(self.initial * MIN_LR_FRACTION)
    }
}

#[allow(clippy::too_many_arguments)]
fn train_documents<S: Slot, R: Rng>(
    docs: &[Vec<u32>],
    input: &[S],
    output: &[S],
    prep: &Prepared,
    keep: &[f64],
    config: &SgnsConfig,
    schedule: &Schedule,
    processed: &AtomicUsize,
    rng: &mut R,
) {
    let dim = config.dim;
    let mut grad = vec![0.0; dim];
    let mut kept: Vec<usize> = Vec::new();
    let mut negs: Vec<usize> = Vec::with_capacity(config.negatives);
    for doc in docs {
        kept.clear();
        kept.extend(
            doc.iter()
                .map(|&w| w as usize)
                .filter(|&w| keep[w] >= 1.0 || rng.gen::<f64>() < keep[w]),
        );
        let lr = schedule.rate(processed.fetch_add(doc.len(), Ordering::Relaxed));
        for i in 0..kept.len() {
            let radius = rng.gen_range(1..=config.window);
            let lo = i.saturating_sub(radius);
            let hi = (i + radius).min(kept.len() - 1);
            for j in lo..=hi {
                if j == i {
                    continue;
                }
                negs.clear();
                negs.extend((0..config.negatives).map(|_| prep.noise.sample(rng)));
                update_pair(input, output, dim, kept[i], kept[j], negs.iter().copied(), lr, &mut grad);
            }
        }
    }
}

pub fn train_sgns(corpus: &TaggedCorpus, config: &SgnsConfig) -> Result<EmbeddingTable> {
    config.validate()?;
    let prep = prepare(corpus, config)?;
    let dim = config.dim;
    let vocab_len = prep.words.len();
    log::info!("vocabulary of {vocab_len} words, {} training tokens", prep.train_words);
    let keep = keep_probabilities(&prep.counts, prep.train_words, config.subsample_threshold);
    let schedule = Schedule {
        initial: config.initial_learning_rate,
        planned: (config.epochs * prep.train_words) as f64,
    };
    let processed = AtomicUsize::new(0);

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut input: Vec<f64> = (0..vocab_len * dim)
        .map(|_| (rng.gen::<f64>() - 0.5) / dim as f64)
        .collect();
    let mut output = vec![0.0f64; vocab_len * dim];

    if config.threads == 1 {
        let input_cells = Cell::from_mut(input.as_mut_slice()).as_slice_of_cells();
        let output_cells = Cell::from_mut(output.as_mut_slice()).as_slice_of_cells();
        for epoch in 0..config.epochs {
            train_documents(
                &prep.docs,
                input_cells,
                output_cells,
                &prep,
                &keep,
                config,
                &schedule,
                &processed,
                &mut rng,
            );
            log::info!("epoch {}/{} done", epoch + 1, config.epochs);
        }
    } else {
        let shared_in: Vec<SharedF64> = input.iter().map(|v| SharedF64(AtomicU64::new(v.to_bits()))).collect();
        let shared_out: Vec<SharedF64> = output.iter().map(|v| SharedF64(AtomicU64::new(v.to_bits()))).collect();
        let chunk = prep.docs.len().div_ceil(config.threads).max(1);
        for epoch in 0..config.epochs {
            std::thread::scope(|scope| {
                for (t, docs) in prep.docs.chunks(chunk).enumerate() {
                    let (shared_in, shared_out) = (&shared_in, &shared_out);
                    let (prep, keep, schedule, processed) = (&prep, &keep, &schedule, &processed);
                    let seed = config
                        .rng_seed
                        .wrapping_add(1 + t as u64)
                        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                        ^ epoch as u64;
                    scope.spawn(move || {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        train_documents(docs, shared_in, shared_out, prep, keep, config, schedule, processed, &mut rng);
                    });
                }
            });
            log::info!("epoch {}/{} done", epoch + 1, config.epochs);
        }
        input = shared_in.iter().map(Slot::get).collect();
        output.clear();
    }

    let mut table = EmbeddingTable::new(dim)?;
    for (i, word) in prep.words.iter().enumerate() {
        table.insert(word.clone(), &input[i * dim..(i + 1) * dim])?;
    }
    table.metadata.extend(config.describe());
    table.metadata.insert("corpus_tokens".into(), corpus.token_count().to_string());
    table.metadata.insert("train_tokens".into(), prep.train_words.to_string());
    table.metadata.insert("corpus".into(), corpus.source.clone());
    Ok(table)
}
