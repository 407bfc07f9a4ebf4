//! Review classification by mean orientation, accuracy reports and cutoff
//! sweeps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::axis::{AxisMode, OrientationLexicon};
use crate::corpus::{Polarity, PolarityLexicon, TaggedCorpus, TaggedDocument};
use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::pattern::{builtin_rules, PhraseOccurrence};
use crate::pipeline::{induce_lexicon, InductionConfig};
use crate::pmi::{NearIndex, PhraseScorer, PmiSeeds};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub label: Polarity,
    pub mean: f64,
    /// No token of the review had a score; the label defaults to positive.
    pub undecided: bool,
}

impl Classification {
    pub fn from_scores(scores: impl IntoIterator<Item = f64>) -> Classification {
        let (sum, n) = scores.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
        let mean = if n == 0 { 0.0 } else { sum / n as f64 };
        Classification {
            label: if mean < 0.0 { Polarity::Neg } else { Polarity::Pos },
            mean,
            undecided: n == 0,
        }
    }
}

/// Mean orientation over the review's scored tokens, with multiplicity;
/// negative iff the mean is below zero.
pub fn classify_review(review: &TaggedDocument, lex: &OrientationLexicon) -> Classification {
    Classification::from_scores(review.tokens.iter().filter_map(|t| lex.get(&t.text)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub n_total: usize,
    pub n_correct: usize,
    pub n_pos_gold: usize,
    pub n_neg_gold: usize,
    pub n_undecided: usize,
    /// `confusion[gold][predicted]`, index 0 positive and 1 negative.
    pub confusion: [[usize; 2]; 2],
    pub config: BTreeMap<String, String>,
}

fn slot(p: Polarity) -> usize {
    match p {
        Polarity::Pos => 0,
        Polarity::Neg => 1,
    }
}

impl EvalReport {
    /// Tallies `(gold, prediction)` pairs.
    pub fn tally<'a>(items: impl IntoIterator<Item = (Polarity, &'a Classification)>) -> Result<EvalReport> {
        let mut r = EvalReport {
            accuracy: 0.0,
            n_total: 0,
            n_correct: 0,
            n_pos_gold: 0,
            n_neg_gold: 0,
            n_undecided: 0,
            confusion: [[0; 2]; 2],
            config: BTreeMap::new(),
        };
        for (gold, c) in items {
            r.n_total += 1;
            r.n_correct += (gold == c.label) as usize;
            r.n_undecided += c.undecided as usize;
            match gold {
                Polarity::Pos => r.n_pos_gold += 1,
                Polarity::Neg => r.n_neg_gold += 1,
            }
            r.confusion[slot(gold)][slot(c.label)] += 1;
        }
        if r.n_total == 0 {
            return Err(Error::EmptyInput("no reviews to evaluate".into()));
        }
        r.accuracy = r.n_correct as f64 / r.n_total as f64;
        Ok(r)
    }

    pub fn with_config(mut self, key: impl Into<String>, value: impl fmt::Display) -> Self {
        self.config.insert(key.into(), value.to_string());
        self
    }

    pub fn write(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "accuracy={}", self.accuracy)?;
        writeln!(out, "n_total={}", self.n_total)?;
        writeln!(out, "n_correct={}", self.n_correct)?;
        writeln!(out, "n_pos_gold={}", self.n_pos_gold)?;
        writeln!(out, "n_neg_gold={}", self.n_neg_gold)?;
        writeln!(out, "n_undecided={}", self.n_undecided)?;
        for (k, v) in &self.config {
            writeln!(out, "config.{k}={v}")?;
        }
        writeln!(out, "[confusion]")?;
        writeln!(out, "gold\\pred\tPOS\tNEG")?;
        for (name, row) in ["POS", "NEG"].iter().zip(&self.confusion) {
            writeln!(out, "{name}\t{}\t{}", row[0], row[1])?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write(&mut buf).map_err(|e| Error::io(path, e))?;
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = Vec::new();
        self.write(&mut buf).map_err(|_| fmt::Error)?;
        f.write_str(&String::from_utf8_lossy(&buf))
    }
}

fn gold_labels(reviews: &[TaggedDocument]) -> Result<Vec<Polarity>> {
    if reviews.is_empty() {
        return Err(Error::EmptyInput("no reviews to evaluate".into()));
    }
    reviews
        .iter()
        .map(|r| {
            r.label
                .ok_or_else(|| Error::Config(format!("review {:?} has no gold label", r.id)))
        })
        .collect()
}

/// Classifies every review with `classify`, spread over the available cores;
/// results keep review order.
pub fn classify_all<F>(reviews: &[TaggedDocument], classify: F) -> Vec<Classification>
where
    F: Fn(&TaggedDocument) -> Classification + Sync,
{
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = reviews.len().div_ceil(threads).max(64);
    if reviews.len() <= chunk {
        return reviews.iter().map(&classify).collect();
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = reviews
            .chunks(chunk)
            .map(|part| {
                let classify = &classify;
                s.spawn(move || part.iter().map(classify).collect::<Vec<_>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("classification thread panicked"))
            .collect()
    })
}

pub fn evaluate(reviews: &[TaggedDocument], lex: &OrientationLexicon) -> Result<EvalReport> {
    if lex.is_empty() {
        return Err(Error::EmptyInput("orientation lexicon is empty".into()));
    }
    let gold = gold_labels(reviews)?;
    let predictions = classify_all(reviews, |r| classify_review(r, lex));
    EvalReport::tally(gold.into_iter().zip(&predictions))
}

/// PMI-IR baseline accuracy; only phrases accepted by `keep` are scored.
pub fn evaluate_pmi(
    reviews: &[TaggedDocument],
    index: &NearIndex,
    seeds: &PmiSeeds,
    keep: impl Fn((&str, &str)) -> bool,
) -> Result<EvalReport> {
    let gold = gold_labels(reviews)?;
    let rules = builtin_rules();
    let mut scorer = PhraseScorer::new(index, seeds.clone());
    let mut predictions = Vec::with_capacity(reviews.len());
    let mut no_phrase = 0usize;
    for r in reviews {
        let c = scorer.classify(r, &rules, &keep)?;
        no_phrase += c.no_phrase as usize;
        predictions.push(Classification {
            label: c.label,
            mean: c.mean,
            undecided: c.no_phrase,
        });
    }
    Ok(EvalReport::tally(gold.into_iter().zip(&predictions))?
        .with_config("mode", SweepMode::Pmi)
        .with_config("window", index.window)
        .with_config("seeds", format!("{},{}", seeds.pos, seeds.neg))
        .with_config("count_mode", seeds.mode)
        .with_config("index_corpus", &index.corpus_fingerprint)
        .with_config("no_phrase_reviews", no_phrase))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Unsup,
    Semi,
    Pmi,
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepMode::Unsup => "UNSUP",
            SweepMode::Semi => "SEMI",
            SweepMode::Pmi => "PMI",
        })
    }
}

impl FromStr for SweepMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "unsup" | "unsupervised" => Ok(SweepMode::Unsup),
            "semi" | "semi-supervised" => Ok(SweepMode::Semi),
            "pmi" | "pmi-ir" => Ok(SweepMode::Pmi),
            other => Err(format!("unknown sweep mode {other:?} (expected unsup, semi or pmi)")),
        }
    }
}

impl From<AxisMode> for SweepMode {
    fn from(m: AxisMode) -> Self {
        match m {
            AxisMode::Unsupervised => SweepMode::Unsup,
            AxisMode::SemiSupervised => SweepMode::Semi,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub cutoff: usize,
    pub k_point_words: usize,
    pub mode: SweepMode,
    /// `None` when the cutoff failed; `reason` then holds the cause.
    pub accuracy: Option<f64>,
    pub reason: Option<String>,
}

/// Short machine-readable cause of a failed sweep step.
pub fn reason_code(err: &Error) -> &'static str {
    match err.root() {
        Error::NoQualifyingPhrase { .. } => "no-qualifying-phrase",
        Error::InsufficientData(_) => "insufficient-data",
        Error::Partition(_) => "partition",
        Error::Degenerate(_) => "degenerate",
        Error::NonConvergence { .. } => "non-convergence",
        Error::SeedMissing(_) => "seed-missing",
        Error::OrientationAmbiguous { .. } => "orientation-ambiguous",
        Error::OutOfVocabulary(_) => "out-of-vocabulary",
        Error::UndefinedCorrelation(_) => "undefined-correlation",
        Error::EmptyInput(_) => "empty-input",
        Error::Config(_) => "config",
        Error::Io { .. } | Error::Parse { .. } => "io",
        Error::Stage { .. } => unreachable!("root() strips stages"),
    }
}

/// Inputs shared by every cutoff of a sweep.
pub struct SweepInputs<'a> {
    pub corpus: &'a TaggedCorpus,
    pub phrases: &'a [PhraseOccurrence],
    pub reviews: &'a [TaggedDocument],
    pub table: Option<&'a EmbeddingTable>,
    pub lexicon: Option<&'a PolarityLexicon>,
    pub index: Option<&'a NearIndex>,
    pub seed_word: &'a str,
    pub pmi_seeds: PmiSeeds,
}

/// One row per cutoff, in the order given. For UNSUP and SEMI each cutoff
/// reruns point-word selection, axis induction, scoring and evaluation. For
/// PMI the cutoff restricts review phrases to types occurring at least
/// `cutoff` times in the training phrases, and `k` counts those types.
pub fn sweep_cutoffs(
    inputs: &SweepInputs<'_>,
    mode: SweepMode,
    cutoffs: impl IntoIterator<Item = usize>,
) -> Result<Vec<SweepRow>> {
    let cutoffs: Vec<usize> = cutoffs.into_iter().collect();
    if cutoffs.is_empty() {
        return Err(Error::Config("cutoff range is empty".into()));
    }
    if let Some(&c) = cutoffs.iter().find(|&&c| c == 0) {
        return Err(Error::Config(format!("cutoff {c} is below 1")));
    }
    let mut type_freq: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for p in inputs.phrases {
        *type_freq.entry(p.phrase()).or_insert(0) += 1;
    }
    let mut rows = Vec::with_capacity(cutoffs.len());
    for cutoff in cutoffs {
        let row = match mode {
            SweepMode::Pmi => {
                let index = inputs
                    .index
                    .ok_or_else(|| Error::Config("PMI sweep needs a proximity index".into()))?;
                let kept: BTreeSet<(&str, &str)> = type_freq
                    .iter()
                    .filter(|&(_, &n)| n >= cutoff)
                    .map(|(&p, _)| p)
                    .collect();
                let result = evaluate_pmi(inputs.reviews, index, &inputs.pmi_seeds, |p| kept.contains(&p));
                finish_row(cutoff, kept.len(), mode, result.map(|r| r.accuracy))
            }
            SweepMode::Unsup | SweepMode::Semi => {
                let table = inputs
                    .table
                    .ok_or_else(|| Error::Config("axis sweep needs embeddings".into()))?;
                let axis_mode = if mode == SweepMode::Unsup {
                    AxisMode::Unsupervised
                } else {
                    AxisMode::SemiSupervised
                };
                if axis_mode == AxisMode::SemiSupervised && inputs.lexicon.is_none() {
                    return Err(Error::Config("semi-supervised sweep needs a polarity lexicon".into()));
                }
                let cfg = InductionConfig {
                    mode: axis_mode,
                    cutoff,
                    seed_word: inputs.seed_word.to_string(),
                };
                match induce_lexicon(inputs.corpus, inputs.phrases, table, inputs.lexicon, &cfg) {
                    Ok(induced) => {
                        let k = induced.points.len();
                        finish_row(cutoff, k, mode, evaluate(inputs.reviews, &induced.lexicon).map(|r| r.accuracy))
                    }
                    Err(e) => {
                        let k = point_count(inputs, cutoff);
                        finish_row(cutoff, k, mode, Err(e))
                    }
                }
            }
        };
        if let Some(reason) = &row.reason {
            log::warn!("cutoff {cutoff}: {reason}");
        }
        rows.push(row);
    }
    Ok(rows)
}

fn point_count(inputs: &SweepInputs<'_>, cutoff: usize) -> usize {
    crate::pattern::select_point_words(inputs.phrases, inputs.corpus, cutoff).map_or(0, |p| p.len())
}

fn finish_row(cutoff: usize, k: usize, mode: SweepMode, result: Result<f64>) -> SweepRow {
    match result {
        Ok(accuracy) => SweepRow {
            cutoff,
            k_point_words: k,
            mode,
            accuracy: Some(accuracy),
            reason: None,
        },
        Err(e) => SweepRow {
            cutoff,
            k_point_words: k,
            mode,
            accuracy: None,
            reason: Some(reason_code(&e).to_string()),
        },
    }
}

pub fn write_sweep_csv(rows: &[SweepRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "cutoff,k,mode,accuracy,reason")?;
    for r in rows {
        let acc = r.accuracy.map(|a| a.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            r.cutoff,
            r.k_point_words,
            r.mode,
            acc,
            r.reason.as_deref().unwrap_or("")
        )?;
    }
    Ok(())
}

/// Parses `A..B` (inclusive) or a single cutoff.
pub fn parse_cutoff_range(s: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let bad = || Error::Config(format!("cutoff range {s:?} is not A..B"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TaggedToken;

    fn lex(entries: &[(&str, f64)]) -> OrientationLexicon {
        OrientationLexicon {
            scores: entries.iter().map(|(w, s)| (w.to_string(), *s)).collect(),
            embedding_fingerprint: String::new(),
            mode: AxisMode::Unsupervised,
            seed: "excellent".into(),
            skipped: vec![],
        }
    }

    fn review(id: &str, words: &[&str], label: Polarity) -> TaggedDocument {
        TaggedDocument {
            id: id.into(),
            tokens: words.iter().map(|w| TaggedToken::new(w, "NN").unwrap()).collect(),
            label: Some(label),
        }
    }

    #[test]
    fn mean_rule() {
        let l = lex(&[("a", 0.2), ("b", -0.1), ("c", -0.2)]);
        let c = classify_review(&review("r", &["a", "b"], Polarity::Pos), &l);
        assert_eq!(c.label, Polarity::Pos);
        assert!((c.mean - 0.05).abs() < 1e-15);
        assert_eq!(classify_review(&review("r", &["c", "b"], Polarity::Pos), &l).label, Polarity::Neg);
        let c = classify_review(&review("r", &["zz"], Polarity::Pos), &l);
        assert_eq!(c.label, Polarity::Pos);
        assert!(c.undecided);
    }

    #[test]
    fn perfect_and_inverted() {
        let l = lex(&[("good", 0.5), ("bad", -0.5)]);
        let reviews = vec![
            review("1", &["good"], Polarity::Pos),
            review("2", &["bad"], Polarity::Neg),
        ];
        let r = evaluate(&reviews, &l).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.confusion, [[1, 0], [0, 1]]);
        let flipped: Vec<_> = reviews
            .iter()
            .cloned()
            .map(|mut d| {
                d.label = d.label.map(Polarity::flipped);
                d
            })
            .collect();
        assert_eq!(evaluate(&flipped, &l).unwrap().accuracy, 0.0);
    }

    #[test]
    fn empty_and_unlabeled() {
        let l = lex(&[("good", 0.5)]);
        assert!(matches!(evaluate(&[], &l), Err(Error::EmptyInput(_))));
        let mut r = review("1", &["good"], Polarity::Pos);
        r.label = None;
        assert!(matches!(evaluate(&[r], &l), Err(Error::Config(_))));
    }

    #[test]
    fn report_format() {
        let l = lex(&[("good", 0.5), ("bad", -0.5)]);
        let reviews = vec![
            review("1", &["good"], Polarity::Pos),
            review("2", &["good"], Polarity::Neg),
            review("3", &["meh"], Polarity::Neg),
        ];
        let r = evaluate(&reviews, &l).unwrap().with_config("cutoff", 5);
        let text = r.to_string();
        assert!(text.starts_with("accuracy=0.3333333333333333\nn_total=3\nn_correct=1\n"));
        assert!(text.contains("n_undecided=1\n"));
        assert!(text.contains("config.cutoff=5\n"));
        assert!(text.ends_with("[confusion]\ngold\\pred\tPOS\tNEG\nPOS\t1\t0\nNEG\t2\t0\n"));
    }

    #[test]
    fn cutoff_ranges() {
        assert_eq!(parse_cutoff_range("1..10").unwrap(), 1..=10);
        assert_eq!(parse_cutoff_range("3").unwrap(), 3..=3);
        assert!(parse_cutoff_range("0..2").is_err());
        assert!(parse_cutoff_range("5..2").is_err());
    }

    #[test]
    fn sweep_csv() {
        let rows = vec![
            finish_row(1, 40, SweepMode::Unsup, Ok(0.625)),
            finish_row(2, 0, SweepMode::Unsup, Err(Error::Partition("x".into()).in_stage("axis"))),
        ];
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "cutoff,k,mode,accuracy,reason\n1,40,UNSUP,0.625,\n2,0,UNSUP,,partition\n"
        );
    }
}
