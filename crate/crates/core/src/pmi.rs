//! PMI-IR semantic orientation over a local proximity index.
//!
//! Search-engine hit counts are replaced by counts over a positional index
//! of a local corpus. `NEAR` holds when two queries occur within `window`
//! tokens of each other in either order; a two-word phrase is anchored at its
//! first token. Orientation of a phrase is
//!
//! ```text
//! SO = log2( hits(p NEAR pos) * hits(neg) / (hits(p NEAR neg) * hits(pos)) )
//! ```
//!
//! with zero `NEAR` counts replaced by 0.01.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::corpus::{Polarity, TaggedCorpus, TaggedDocument};
use crate::error::{Error, Result};
use crate::pattern::{extract_from_tokens, PatternRule};

pub const DEFAULT_WINDOW: usize = 10;
pub const ZERO_HIT_SMOOTHING: f64 = 0.01;

/// A term or a contiguous two-word phrase.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Query {
    Term(String),
    Phrase(String, String),
}

impl Query {
    pub fn term(w: &str) -> Query {
        Query::Term(w.to_string())
    }

    pub fn phrase(w1: &str, w2: &str) -> Query {
        Query::Phrase(w1.to_string(), w2.to_string())
    }

    fn span(&self) -> usize {
        match self {
            Query::Term(_) => 1,
            Query::Phrase(..) => 2,
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Term(w) => f.write_str(w),
            Query::Phrase(a, b) => write!(f, "{a} {b}"),
        }
    }
}

/// How hits are counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CountMode {
    /// Distinct documents, like search-engine result counts.
    #[default]
    Document,
    /// Occurrences (for `NEAR`, co-occurring occurrence pairs).
    Token,
}

impl FromStr for CountMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "doc" | "document" => Ok(CountMode::Document),
            "token" => Ok(CountMode::Token),
            other => Err(format!("unknown count mode {other:?} (expected document or token)")),
        }
    }
}

impl fmt::Display for CountMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountMode::Document => "document",
            CountMode::Token => "token",
        })
    }
}

/// Positional postings of a corpus: term → document → token positions.
///
/// `NEAR` document sets are derived from the postings on demand, so the
/// index holds every pair relation without materializing all of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearIndex {
    pub window: usize,
    pub doc_ids: Vec<String>,
    /// Fingerprint of the indexed corpus.
    pub corpus_fingerprint: String,
    postings: HashMap<String, BTreeMap<u32, Vec<u32>>>,
}

pub fn build_near_index(corpus: &TaggedCorpus, window: usize) -> Result<NearIndex> {
    if corpus.is_empty() {
        return Err(Error::EmptyInput(format!("{} has no documents", corpus.source)));
    }
    let mut postings: HashMap<String, BTreeMap<u32, Vec<u32>>> = HashMap::new();
    for (d, doc) in corpus.documents.iter().enumerate() {
        for (p, tok) in doc.tokens.iter().enumerate() {
            postings
                .entry(tok.text.clone())
                .or_default()
                .entry(d as u32)
                .or_default()
                .push(p as u32);
        }
    }
    Ok(NearIndex {
        window,
        doc_ids: corpus.documents.iter().map(|d| d.id.clone()).collect(),
        corpus_fingerprint: corpus.fingerprint(),
        postings,
    })
}

impl NearIndex {
    pub fn vocabulary_size(&self) -> usize {
        self.postings.len()
    }

    /// Anchor positions of `q` per document.
    fn occurrences(&self, q: &Query) -> BTreeMap<u32, Vec<u32>> {
        match q {
            Query::Term(w) => self.postings.get(w).cloned().unwrap_or_default(),
            Query::Phrase(a, b) => {
                let (Some(pa), Some(pb)) = (self.postings.get(a), self.postings.get(b)) else {
                    return BTreeMap::new();
                };
                let mut out = BTreeMap::new();
                for (doc, starts) in pa {
                    let Some(nexts) = pb.get(doc) else { continue };
                    let hits: Vec<u32> = starts
                        .iter()
                        .copied()
                        .filter(|s| nexts.binary_search(&(s + 1)).is_ok())
                        .collect();
                    if !hits.is_empty() {
                        out.insert(*doc, hits);
                    }
                }
                out
            }
        }
    }

    /// Documents containing `q`.
    pub fn doc_hits(&self, q: &Query) -> BTreeSet<String> {
        self.occurrences(q).keys().map(|&d| self.doc_ids[d as usize].clone()).collect()
    }

    pub fn hits(&self, q: &Query, mode: CountMode) -> u64 {
        let occ = self.occurrences(q);
        match mode {
            CountMode::Document => occ.len() as u64,
            CountMode::Token => occ.values().map(|v| v.len() as u64).sum(),
        }
    }

    /// Per document, the number of occurrence pairs of `a` and `b` whose
    /// anchors are at most `window` apart and whose spans do not overlap.
    fn near_pairs(&self, a: &Query, b: &Query) -> BTreeMap<u32, u64> {
        let oa = self.occurrences(a);
        let ob = self.occurrences(b);
        let w = self.window as i64;
        let (sa, sb) = (a.span() as i64, b.span() as i64);
        let mut out = BTreeMap::new();
        for (doc, pa) in &oa {
            let Some(pb) = ob.get(doc) else { continue };
            let mut n = 0u64;
            for &p in pa {
                let p = p as i64;
                let lo = pb.partition_point(|&q| (q as i64) < p - w);
                for &q in &pb[lo..] {
                    let q = q as i64;
                    if q > p + w {
                        break;
                    }
                    let disjoint = p + sa <= q || q + sb <= p;
                    if disjoint {
                        n += 1;
                    }
                }
            }
            if n > 0 {
                out.insert(*doc, n);
            }
        }
        out
    }

    /// Documents where `a NEAR b` holds.
    pub fn near_hits(&self, a: &Query, b: &Query) -> BTreeSet<String> {
        self.near_pairs(a, b)
            .keys()
            .map(|&d| self.doc_ids[d as usize].clone())
            .collect()
    }

    pub fn near_count(&self, a: &Query, b: &Query, mode: CountMode) -> u64 {
        let pairs = self.near_pairs(a, b);
        match mode {
            CountMode::Document => pairs.len() as u64,
            CountMode::Token => pairs.values().sum(),
        }
    }

    /// Writes the postings with a `# window=… corpus=…` header.
    pub fn write_tsv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(
            out,
            "# window={} corpus={} docs={}",
            self.window,
            self.corpus_fingerprint,
            self.doc_ids.len()
        )?;
        for id in &self.doc_ids {
            writeln!(out, "doc\t{id}")?;
        }
        let mut terms: Vec<&String> = self.postings.keys().collect();
        terms.sort();
        for term in terms {
            write!(out, "term\t{term}")?;
            for (doc, positions) in &self.postings[term] {
                let ps: Vec<String> = positions.iter().map(|p| p.to_string()).collect();
                write!(out, "\t{doc}:{}", ps.join(","))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).map_err(|e| Error::io(path, e))?;
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<NearIndex> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        NearIndex::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<NearIndex> {
        let mut lines = text.lines().enumerate();
        let header = lines
            .next()
            .and_then(|(_, l)| l.strip_prefix("# "))
            .ok_or_else(|| Error::parse(source, 1, "missing index header"))?;
        let mut window = None;
        let mut fingerprint = String::new();
        for kv in header.split_whitespace() {
            match kv.split_once('=') {
                Some(("window", v)) => window = v.parse().ok(),
                Some(("corpus", v)) => fingerprint = v.to_string(),
                _ => {}
            }
        }
        let window = window.ok_or_else(|| Error::parse(source, 1, "header lacks window=N"))?;
        let mut doc_ids = Vec::new();
        let mut postings = HashMap::new();
        for (idx, line) in lines {
            let bad = |m: &str| Error::parse(source, idx + 1, m);
            let mut fields = line.split('\t');
            match fields.next() {
                Some("doc") => doc_ids.push(fields.next().ok_or_else(|| bad("doc line lacks an id"))?.to_string()),
                Some("term") => {
                    let term = fields.next().ok_or_else(|| bad("term line lacks a term"))?;
                    let mut docs = BTreeMap::new();
                    for f in fields {
                        let (d, ps) = f.split_once(':').ok_or_else(|| bad("posting is not doc:positions"))?;
                        let d: u32 = d.parse().map_err(|_| bad("bad document number"))?;
                        if d as usize >= doc_ids.len() {
                            return Err(bad("posting refers to an undeclared document"));
                        }
                        let ps = ps
                            .split(',')
                            .map(|p| p.parse::<u32>().map_err(|_| bad("bad position")))
                            .collect::<Result<Vec<_>>>()?;
                        docs.insert(d, ps);
                    }
                    postings.insert(term.to_string(), docs);
                }
                Some("") | None => {}
                Some(_) => return Err(bad("expected a doc or term line")),
            }
        }
        Ok(NearIndex {
            window,
            doc_ids,
            corpus_fingerprint: fingerprint,
            postings,
        })
    }
}

/// The four counts entering the orientation formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HitCounts {
    pub near_pos: u64,
    pub near_neg: u64,
    pub pos_seed: u64,
    pub neg_seed: u64,
}

impl HitCounts {
    pub fn orientation(&self) -> f64 {
        let smooth = |n: u64| if n == 0 { ZERO_HIT_SMOOTHING } else { n as f64 };
        let num = smooth(self.near_pos) * self.neg_seed as f64;
        let den = smooth(self.near_neg) * self.pos_seed as f64;
        // the larger side goes on top so that swapping seeds negates exactly
        if num >= den {
            (num / den).log2()
        } else {
            -(den / num).log2()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhraseSO {
    pub phrase: (String, String),
    pub so: f64,
    pub hit_counts: HitCounts,
}

/// Seed words and counting mode for phrase orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PmiSeeds {
    pub pos: String,
    pub neg: String,
    pub mode: CountMode,
}

impl Default for PmiSeeds {
    fn default() -> Self {
        PmiSeeds {
            pos: "excellent".into(),
            neg: "poor".into(),
            mode: CountMode::Document,
        }
    }
}

impl PmiSeeds {
    pub fn swapped(&self) -> PmiSeeds {
        PmiSeeds {
            pos: self.neg.clone(),
            neg: self.pos.clone(),
            mode: self.mode,
        }
    }
}

pub fn so_phrase(index: &NearIndex, phrase: (&str, &str), seeds: &PmiSeeds) -> Result<PhraseSO> {
    let pos = Query::term(&seeds.pos);
    let neg = Query::term(&seeds.neg);
    let pos_seed = index.hits(&pos, seeds.mode);
    let neg_seed = index.hits(&neg, seeds.mode);
    for (w, n) in [(&seeds.pos, pos_seed), (&seeds.neg, neg_seed)] {
        if n == 0 {
            return Err(Error::SeedMissing(w.clone()));
        }
    }
    let p = Query::phrase(phrase.0, phrase.1);
    let hit_counts = HitCounts {
        near_pos: index.near_count(&p, &pos, seeds.mode),
        near_neg: index.near_count(&p, &neg, seeds.mode),
        pos_seed,
        neg_seed,
    };
    Ok(PhraseSO {
        phrase: (phrase.0.to_string(), phrase.1.to_string()),
        so: hit_counts.orientation(),
        hit_counts,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PmiClassification {
    pub label: Polarity,
    pub mean: f64,
    pub phrases: usize,
    /// No phrase was extracted; the label defaults to positive.
    pub no_phrase: bool,
}

/// Labels a review negative iff the mean orientation of its extracted
/// phrases is below zero.
pub fn classify_review_pmi(
    index: &NearIndex,
    review: &TaggedDocument,
    rules: &[PatternRule],
    seeds: &PmiSeeds,
) -> Result<PmiClassification> {
    let mut scorer = PhraseScorer::new(index, seeds.clone());
    scorer.classify(review, rules, |_| true)
}

/// Phrase orientations with a cache, for classifying many reviews.
pub struct PhraseScorer<'a> {
    index: &'a NearIndex,
    seeds: PmiSeeds,
    cache: HashMap<(String, String), f64>,
}

impl<'a> PhraseScorer<'a> {
    pub fn new(index: &'a NearIndex, seeds: PmiSeeds) -> Self {
        PhraseScorer {
            index,
            seeds,
            cache: HashMap::new(),
        }
    }

    pub fn so(&mut self, w1: &str, w2: &str) -> Result<f64> {
        let key = (w1.to_string(), w2.to_string());
        if let Some(&so) = self.cache.get(&key) {
            return Ok(so);
        }
        let so = so_phrase(self.index, (w1, w2), &self.seeds)?.so;
        self.cache.insert(key, so);
        Ok(so)
    }

    /// Like [`classify_review_pmi`], scoring only phrases accepted by `keep`.
    pub fn classify(
        &mut self,
        review: &TaggedDocument,
        rules: &[PatternRule],
        keep: impl Fn((&str, &str)) -> bool,
    ) -> Result<PmiClassification> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for p in extract_from_tokens(&review.id, &review.tokens, rules) {
            if !keep(p.phrase()) {
                continue;
            }
            sum += self.so(&p.w1, &p.w2)?;
            n += 1;
        }
        let mean = if n == 0 { 0.0 } else { sum / n as f64 };
        Ok(PmiClassification {
            label: if mean < 0.0 { Polarity::Neg } else { Polarity::Pos },
            mean,
            phrases: n,
            no_phrase: n == 0,
        })
    }
}

/// Writes `doc_hits` for the seeds and `near_hits` for every phrase of
/// `phrases` against both seeds, as TSV.
pub fn write_hit_dump(
    index: &NearIndex,
    phrases: &BTreeSet<(String, String)>,
    seeds: &PmiSeeds,
    mut out: impl Write,
) -> std::io::Result<()> {
    writeln!(out, "# window={} corpus={} mode={}", index.window, index.corpus_fingerprint, seeds.mode)?;
    for seed in [&seeds.pos, &seeds.neg] {
        let q = Query::term(seed);
        writeln!(out, "doc_hits\t{seed}\t{}", index.hits(&q, seeds.mode))?;
    }
    for (a, b) in phrases {
        let p = Query::phrase(a, b);
        for seed in [&seeds.pos, &seeds.neg] {
            let n = index.near_count(&p, &Query::term(seed), seeds.mode);
            writeln!(out, "near_hits\t{a} {b}\t{seed}\t{n}")?;
        }
    }
    Ok(())
}
