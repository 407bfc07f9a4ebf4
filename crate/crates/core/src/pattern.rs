//! Two-word phrase extraction by POS-tag patterns, point-word selection and
//! per-tag polarity variance.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::corpus::{TaggedCorpus, TaggedToken, MODIFIER_TAGS};
use crate::error::{Error, Result};

/// Constraint on the token following a matched bigram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThirdWord {
    Anything,
    NotNnNorNns,
}

impl ThirdWord {
    /// `None` means the bigram ends its document, which satisfies every
    /// constraint.
    pub fn admits(self, tag: Option<&str>) -> bool {
        match (self, tag) {
            (ThirdWord::Anything, _) | (_, None) => true,
            (ThirdWord::NotNnNorNns, Some(t)) => t != "NN" && t != "NNS",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternRule {
    pub first: BTreeSet<String>,
    pub second: BTreeSet<String>,
    pub third: ThirdWord,
}

impl PatternRule {
    pub fn new(first: &[&str], second: &[&str], third: ThirdWord) -> Result<Self> {
        if first.is_empty() || second.is_empty() {
            return Err(Error::Config("pattern rule needs non-empty first and second tag sets".into()));
        }
        Ok(PatternRule {
            first: first.iter().map(|s| s.to_string()).collect(),
            second: second.iter().map(|s| s.to_string()).collect(),
            third,
        })
    }

    pub fn matches(&self, first: &str, second: &str, third: Option<&str>) -> bool {
        self.first.contains(first) && self.second.contains(second) && self.third.admits(third)
    }
}

/// The five phrase patterns, in priority order (index 0 is rule 1).
pub fn builtin_rules() -> Vec<PatternRule> {
    const ADVERB: &[&str] = &["RB", "RBR", "RBS"];
    const NOUN: &[&str] = &["NN", "NNS"];
    [
        (&["JJ"][..], NOUN, ThirdWord::Anything),
        (ADVERB, &["JJ"][..], ThirdWord::NotNnNorNns),
        (&["JJ"][..], &["JJ"][..], ThirdWord::NotNnNorNns),
        (NOUN, &["VB", "VBD"][..], ThirdWord::NotNnNorNns),
        (ADVERB, &["VBN", "VBG"][..], ThirdWord::Anything),
    ]
    .into_iter()
    .map(|(a, b, c)| PatternRule::new(a, b, c).expect("built-in rules are non-empty"))
    .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhraseOccurrence {
    pub w1: String,
    pub w2: String,
    /// 1-based index into the rule list.
    pub rule_index: usize,
    pub doc_id: String,
    /// Token index of `w1` within its document.
    pub position: usize,
}

impl PhraseOccurrence {
    pub fn phrase(&self) -> (&str, &str) {
        (&self.w1, &self.w2)
    }
}

/// Index (1-based) of the first rule matching the bigram starting at `i`.
pub fn match_at(tokens: &[TaggedToken], i: usize, rules: &[PatternRule]) -> Option<usize> {
    let (a, b) = (tokens.get(i)?, tokens.get(i + 1)?);
    let third = tokens.get(i + 2).map(|t| t.tag.as_str());
    rules
        .iter()
        .position(|r| r.matches(&a.tag, &b.tag, third))
        .map(|p| p + 1)
}

/// Phrases of one token sequence, in position order.
pub fn extract_from_tokens(doc_id: &str, tokens: &[TaggedToken], rules: &[PatternRule]) -> Vec<PhraseOccurrence> {
    (0..tokens.len().saturating_sub(1))
        .filter_map(|i| {
            match_at(tokens, i, rules).map(|rule_index| PhraseOccurrence {
                w1: tokens[i].text.clone(),
                w2: tokens[i + 1].text.clone(),
                rule_index,
                doc_id: doc_id.to_string(),
                position: i,
            })
        })
        .collect()
}

pub fn extract_phrases(corpus: &TaggedCorpus, rules: &[PatternRule]) -> Vec<PhraseOccurrence> {
    corpus
        .documents
        .iter()
        .flat_map(|d| extract_from_tokens(&d.id, &d.tokens, rules))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PointWordSet {
    pub words: BTreeSet<String>,
    pub cutoff: usize,
    /// Type frequency of every phrase that reached the cutoff.
    pub phrase_counts: BTreeMap<(String, String), usize>,
    /// Modifier occurrences of each point word inside qualifying phrases.
    pub word_counts: BTreeMap<String, usize>,
}

impl PointWordSet {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

pub fn select_point_words(phrases: &[PhraseOccurrence], corpus: &TaggedCorpus, cutoff: usize) -> Result<PointWordSet> {
    select_point_words_with(phrases, corpus, cutoff, MODIFIER_TAGS)
}

/// Keeps phrases whose `(w1, w2)` type frequency reaches `cutoff` and
/// collects their words tagged with one of `modifier_tags` at the matched
/// occurrence.
pub fn select_point_words_with(
    phrases: &[PhraseOccurrence],
    corpus: &TaggedCorpus,
    cutoff: usize,
    modifier_tags: &[&str],
) -> Result<PointWordSet> {
    if cutoff == 0 {
        return Err(Error::Config("cutoff must be at least 1".into()));
    }
    let docs: HashMap<&str, &[TaggedToken]> = corpus
        .documents
        .iter()
        .map(|d| (d.id.as_str(), d.tokens.as_slice()))
        .collect();

    let mut type_freq: HashMap<(&str, &str), usize> = HashMap::new();
    for p in phrases {
        *type_freq.entry(p.phrase()).or_insert(0) += 1;
    }

    let mut set = PointWordSet {
        cutoff,
        ..PointWordSet::default()
    };
    for p in phrases {
        let freq = type_freq[&p.phrase()];
        if freq < cutoff {
            continue;
        }
        set.phrase_counts
            .entry((p.w1.clone(), p.w2.clone()))
            .or_insert(freq);
        let tokens = docs
            .get(p.doc_id.as_str())
            .ok_or_else(|| Error::Config(format!("phrase refers to unknown document {:?}", p.doc_id)))?;
        for (offset, word) in [(0, &p.w1), (1, &p.w2)] {
            let tok = tokens.get(p.position + offset).ok_or_else(|| {
                Error::Config(format!("phrase position {} outside document {:?}", p.position, p.doc_id))
            })?;
            if &tok.text != word {
                return Err(Error::Config(format!(
                    "phrase word {word:?} does not match token {:?} in document {:?}",
                    tok.text, p.doc_id
                )));
            }
            if modifier_tags.contains(&tok.tag.as_str()) {
                set.words.insert(word.clone());
                *set.word_counts.entry(word.clone()).or_insert(0) += 1;
            }
        }
    }
    if set.words.is_empty() {
        return Err(Error::NoQualifyingPhrase { cutoff });
    }
    Ok(set)
}

pub fn write_phrases(phrases: &[PhraseOccurrence], mut out: impl Write) -> std::io::Result<()> {
    for p in phrases {
        writeln!(out, "{}\t{}\t{}\t{}\t{}", p.w1, p.w2, p.rule_index, p.doc_id, p.position)?;
    }
    Ok(())
}

pub fn load_phrases(path: impl AsRef<Path>) -> Result<Vec<PhraseOccurrence>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let bad = |m: &str| Error::parse(&source, idx + 1, m);
        let [w1, w2, rule, doc, pos] = f.as_slice() else {
            return Err(bad("expected 5 tab-separated fields"));
        };
        out.push(PhraseOccurrence {
            w1: w1.to_string(),
            w2: w2.to_string(),
            rule_index: rule.parse().map_err(|_| bad("rule is not an integer"))?,
            doc_id: doc.to_string(),
            position: pos.parse().map_err(|_| bad("position is not an integer"))?,
        });
    }
    Ok(out)
}

pub fn write_point_words(points: &PointWordSet, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "# cutoff={}", points.cutoff)?;
    for w in &points.words {
        writeln!(out, "{}\t{}", w, points.word_counts.get(w).copied().unwrap_or(0))?;
    }
    Ok(())
}

pub fn load_point_words(path: impl AsRef<Path>) -> Result<PointWordSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    let mut set = PointWordSet::default();
    for (idx, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix("# cutoff=") {
            set.cutoff = rest.trim().parse().map_err(|_| Error::parse(&source, idx + 1, "bad cutoff"))?;
            continue;
        }
        if line.is_empty() || line.starts_with("# ") {
            continue;
        }
        let (word, count) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(&source, idx + 1, "expected \"word<TAB>count\""))?;
        let count: usize = count
            .parse()
            .map_err(|_| Error::parse(&source, idx + 1, "count is not an integer"))?;
        set.words.insert(word.to_string());
        set.word_counts.insert(word.to_string(), count);
    }
    if set.words.is_empty() {
        return Err(Error::EmptyInput(format!("{source} lists no point words")));
    }
    Ok(set)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TagVariance {
    /// Population variance of the tag's polarity values.
    pub variance: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TagVarianceReport {
    pub per_tag: BTreeMap<String, TagVariance>,
    /// Sum over tags of `variance × count`.
    pub total_variance: f64,
}

impl TagVarianceReport {
    /// Fraction of `total_variance` contributed by `tag`.
    pub fn share(&self, tag: &str) -> f64 {
        match self.per_tag.get(tag) {
            Some(tv) if self.total_variance > 0.0 => tv.variance * tv.count as f64 / self.total_variance,
            _ => 0.0,
        }
    }

    /// Tags by descending share, ties by tag name.
    pub fn ranking(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = self.per_tag.keys().map(|t| (t.clone(), self.share(t))).collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    pub fn write_tsv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "tag\tvariance\tcount\tshare")?;
        for (tag, share) in self.ranking() {
            let tv = self.per_tag[&tag];
            writeln!(out, "{tag}\t{}\t{}\t{share}", tv.variance, tv.count)?;
        }
        writeln!(out, "# total_variance={}", self.total_variance)
    }
}

pub fn tag_polarity_variance(annotated: &[(TaggedToken, f64)]) -> Result<TagVarianceReport> {
    if annotated.is_empty() {
        return Err(Error::EmptyInput("no annotated tokens".into()));
    }
    let mut groups: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (tok, v) in annotated {
        if !v.is_finite() {
            return Err(Error::Config(format!("non-finite polarity for {:?}", tok.text)));
        }
        groups.entry(tok.tag.as_str()).or_default().push(*v);
    }
    let mut per_tag = BTreeMap::new();
    let mut total = 0.0;
    for (tag, values) in groups {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        total += variance * n;
        per_tag.insert(
            tag.to_string(),
            TagVariance {
                variance,
                count: values.len(),
            },
        );
    }
    Ok(TagVarianceReport {
        per_tag,
        total_variance: total,
    })
}
