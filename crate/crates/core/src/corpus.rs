//! POS-tagged corpora, labeled review sets, polarity lexicons and token
//! frequency tables.
//!
//! Two corpus layouts are accepted:
//!
//! * [`CorpusFormat::TokenPerLine`]: `token<TAB>TAG` per line, a blank line
//!   between documents. A line `#doc<TAB>id<TAB>label` (label `POS`, `NEG` or
//!   `-`) may open a document to carry its id and gold label.
//! * [`CorpusFormat::InlineTags`]: one document per line, tokens written as
//!   `token_TAG` separated by single spaces. The line may be prefixed with
//!   `id<TAB>label<TAB>`.
//!
//! Every token is lowercased at load time.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Penn Treebank tag inventory, including punctuation tags.
pub const PTB_TAGS: &[&str] = &[
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP", "NNPS",
    "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG",
    "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB", "#", "$", "''", "``", "(", ")", ",", ".", ":",
    "-LRB-", "-RRB-",
];

/// Tags that count as modifiers (adjectives and adverbs).
pub const MODIFIER_TAGS: &[&str] = &["JJ", "JJR", "JJS", "RB", "RBR", "RBS"];

const DOC_HEADER: &str = "#doc";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    pub fn flipped(self) -> Polarity {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Pos => "POS",
            Polarity::Neg => "NEG",
        })
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "POS" | "POSITIVE" | "1" | "+1" => Ok(Polarity::Pos),
            "NEG" | "NEGATIVE" | "0" | "-1" => Ok(Polarity::Neg),
            other => Err(format!("unknown polarity label {other:?}")),
        }
    }
}

/// Whether a tag belongs to the recognized inventory or is carried verbatim
/// as an unknown tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TagClass {
    Ptb,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TaggedToken {
    pub text: String,
    pub tag: String,
}

impl TaggedToken {
    /// Builds a token, lowercasing the text. Empty text or tag is rejected.
    pub fn new(text: &str, tag: &str) -> std::result::Result<Self, String> {
        if text.is_empty() {
            return Err("empty token text".into());
        }
        if tag.is_empty() {
            return Err(format!("empty tag for token {text:?}"));
        }
        Ok(TaggedToken {
            text: text.to_lowercase(),
            tag: tag.to_string(),
        })
    }

    pub fn tag_class(&self) -> TagClass {
        if PTB_TAGS.contains(&self.tag.as_str()) {
            TagClass::Ptb
        } else {
            TagClass::Other
        }
    }

    pub fn is_modifier(&self) -> bool {
        MODIFIER_TAGS.contains(&self.tag.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaggedDocument {
    pub id: String,
    pub tokens: Vec<TaggedToken>,
    pub label: Option<Polarity>,
}

impl TaggedDocument {
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.text.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusFormat {
    TokenPerLine,
    InlineTags,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "token-per-line" | "tokens" | "conll" => Ok(CorpusFormat::TokenPerLine),
            "inline" | "inline-tags" | "slash" => Ok(CorpusFormat::InlineTags),
            other => Err(format!("unknown corpus format {other:?}")),
        }
    }
}

impl CorpusFormat {
    /// Guess from the file extension: `.tok`/`.conll` are token-per-line,
    /// anything else is inline.
    pub fn from_path(path: &Path) -> CorpusFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tok") | Some("conll") | Some("tokens") => CorpusFormat::TokenPerLine,
            _ => CorpusFormat::InlineTags,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaggedCorpus {
    pub documents: Vec<TaggedDocument>,
    pub source: String,
}

impl TaggedCorpus {
    /// Builds a corpus, checking that ids are distinct and documents non-empty.
    pub fn new(documents: Vec<TaggedDocument>, source: impl Into<String>) -> Result<Self> {
        let source = source.into();
        let mut seen = HashSet::new();
        for doc in &documents {
            if doc.tokens.is_empty() {
                return Err(Error::Config(format!("document {:?} has no tokens", doc.id)));
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::Config(format!("duplicate document id {:?} in {source}", doc.id)));
            }
        }
        Ok(TaggedCorpus { documents, source })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    /// Keeps only documents carrying a gold label.
    pub fn labeled_only(&self) -> TaggedCorpus {
        TaggedCorpus {
            documents: self.documents.iter().filter(|d| d.label.is_some()).cloned().collect(),
            source: self.source.clone(),
        }
    }

    /// SHA-256 over the token-per-line serialization.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(to_token_per_line(self).as_bytes());
        hex::encode(&hasher.finalize()[..8])
    }
}

fn label_field(label: Option<Polarity>) -> String {
    label.map_or_else(|| "-".to_string(), |l| l.to_string())
}

fn parse_label(field: &str) -> std::result::Result<Option<Polarity>, String> {
    match field {
        "" | "-" | "_" => Ok(None),
        other => other.parse().map(Some),
    }
}

pub fn load_tagged_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<TaggedCorpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tagged_corpus(&text, format, &path.display().to_string())
}

pub fn parse_tagged_corpus(text: &str, format: CorpusFormat, source: &str) -> Result<TaggedCorpus> {
    let documents = match format {
        CorpusFormat::TokenPerLine => parse_token_per_line(text, source)?,
        CorpusFormat::InlineTags => parse_inline(text, source)?,
    };
    if documents.is_empty() {
        return Err(Error::EmptyInput(format!("{source} contains no documents")));
    }
    TaggedCorpus::new(documents, source)
}

fn parse_token_per_line(text: &str, source: &str) -> Result<Vec<TaggedDocument>> {
    struct Pending {
        id: Option<String>,
        label: Option<Polarity>,
        tokens: Vec<TaggedToken>,
        header_line: usize,
    }

    let mut docs = Vec::new();
    let mut cur = Pending {
        id: None,
        label: None,
        tokens: Vec::new(),
        header_line: 0,
    };

    let finish = |cur: &mut Pending, docs: &mut Vec<TaggedDocument>| -> Result<()> {
        if cur.tokens.is_empty() {
            if cur.id.is_some() {
                return Err(Error::parse(source, cur.header_line, "document header without tokens"));
            }
            return Ok(());
        }
        let id = cur.id.take().unwrap_or_else(|| format!("doc{}", docs.len() + 1));
        docs.push(TaggedDocument {
            id,
            tokens: std::mem::take(&mut cur.tokens),
            label: cur.label.take(),
        });
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            finish(&mut cur, &mut docs)?;
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.as_slice() {
            [DOC_HEADER, id, label] => {
                finish(&mut cur, &mut docs)?;
                if id.is_empty() {
                    return Err(Error::parse(source, lineno, "empty document id"));
                }
                cur.id = Some(id.to_string());
                cur.label = parse_label(label).map_err(|m| Error::parse(source, lineno, m))?;
                cur.header_line = lineno;
            }
            [word, tag] => {
                let tok = TaggedToken::new(word, tag).map_err(|m| Error::parse(source, lineno, m))?;
                cur.tokens.push(tok);
            }
            _ => {
                return Err(Error::parse(
                    source,
                    lineno,
                    format!("expected \"token<TAB>TAG\", found {} field(s)", fields.len()),
                ))
            }
        }
    }
    finish(&mut cur, &mut docs)?;
    Ok(docs)
}

fn parse_inline_token(item: &str) -> std::result::Result<TaggedToken, String> {
    let (word, tag) = item
        .rsplit_once('_')
        .ok_or_else(|| format!("token {item:?} has no \"_TAG\" suffix"))?;
    TaggedToken::new(word, tag)
}

fn parse_inline(text: &str, source: &str) -> Result<Vec<TaggedDocument>> {
    let mut docs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let (id, label, body) = match fields.as_slice() {
            [body] => (format!("doc{}", docs.len() + 1), None, *body),
            [id, label, body] if !id.is_empty() => {
                let label = parse_label(label).map_err(|m| Error::parse(source, lineno, m))?;
                (id.to_string(), label, *body)
            }
            _ => {
                return Err(Error::parse(
                    source,
                    lineno,
                    format!("expected 1 or 3 tab-separated fields, found {}", fields.len()),
                ))
            }
        };
        let tokens = body
            .split(' ')
            .filter(|s| !s.is_empty())
            .map(parse_inline_token)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|m| Error::parse(source, lineno, m))?;
        if tokens.is_empty() {
            return Err(Error::parse(source, lineno, "document has no tokens"));
        }
        docs.push(TaggedDocument { id, tokens, label });
    }
    Ok(docs)
}

/// Serializes in token-per-line layout, always emitting document headers.
pub fn to_token_per_line(corpus: &TaggedCorpus) -> String {
    let mut out = String::new();
    for (i, doc) in corpus.documents.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("{DOC_HEADER}\t{}\t{}\n", doc.id, label_field(doc.label)));
        for tok in &doc.tokens {
            out.push_str(&tok.text);
            out.push('\t');
            out.push_str(&tok.tag);
            out.push('\n');
        }
    }
    out
}

/// Serializes in inline layout with the `id<TAB>label<TAB>` prefix.
pub fn to_inline(corpus: &TaggedCorpus) -> String {
    let mut out = String::new();
    for doc in &corpus.documents {
        out.push_str(&doc.id);
        out.push('\t');
        out.push_str(&label_field(doc.label));
        out.push('\t');
        let body: Vec<String> = doc.tokens.iter().map(|t| format!("{}_{}", t.text, t.tag)).collect();
        out.push_str(&body.join(" "));
        out.push('\n');
    }
    out
}

pub fn save_tagged_corpus(corpus: &TaggedCorpus, path: impl AsRef<Path>, format: CorpusFormat) -> Result<()> {
    let path = path.as_ref();
    let text = match format {
        CorpusFormat::TokenPerLine => to_token_per_line(corpus),
        CorpusFormat::InlineTags => to_inline(corpus),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarityLexicon {
    pub entries: BTreeMap<String, f64>,
    pub neutral_threshold: f64,
    /// Number of lines that repeated an earlier word (the later score wins).
    pub duplicate_count: usize,
}

impl PolarityLexicon {
    pub fn from_entries<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        PolarityLexicon {
            entries: entries.into_iter().map(|(w, s)| (w.into(), s)).collect(),
            neutral_threshold: 0.0,
            duplicate_count: 0,
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.neutral_threshold = threshold;
        self
    }

    pub fn get(&self, word: &str) -> Option<f64> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_polarity_lexicon(path: impl AsRef<Path>) -> Result<PolarityLexicon> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_polarity_lexicon(&text, &path.display().to_string())
}

pub fn parse_polarity_lexicon(text: &str, source: &str) -> Result<PolarityLexicon> {
    let mut entries = BTreeMap::new();
    let mut duplicates = 0;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (word, score) = match (fields.next(), fields.next()) {
            (Some(w), Some(s)) if !w.is_empty() => (w, s),
            _ => return Err(Error::parse(source, lineno, "expected \"word<TAB>score\"")),
        };
        let score: f64 = score
            .trim()
            .parse()
            .map_err(|_| Error::parse(source, lineno, format!("score {score:?} is not a number")))?;
        if !score.is_finite() {
            return Err(Error::parse(source, lineno, "score is not finite"));
        }
        if entries.insert(word.to_lowercase(), score).is_some() {
            duplicates += 1;
        }
    }
    if entries.is_empty() {
        return Err(Error::EmptyInput(format!("{source} contains no lexicon entries")));
    }
    if duplicates > 0 {
        log::warn!("{source}: {duplicates} duplicate word(s), later entries kept");
    }
    Ok(PolarityLexicon {
        entries,
        neutral_threshold: 0.0,
        duplicate_count: duplicates,
    })
}

/// Tokens annotated with a polarity value, one `token<TAB>TAG<TAB>value` per
/// line; lines starting with `# ` are comments.
pub fn load_annotated_tokens(path: impl AsRef<Path>) -> Result<Vec<(TaggedToken, f64)>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with("# ") {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [word, tag, value] = fields.as_slice() else {
            return Err(Error::parse(&source, idx + 1, "expected \"token<TAB>TAG<TAB>value\""));
        };
        let tok = TaggedToken::new(word, tag).map_err(|m| Error::parse(&source, idx + 1, m))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::parse(&source, idx + 1, format!("value {value:?} is not a number")))?;
        out.push((tok, value));
    }
    if out.is_empty() {
        return Err(Error::EmptyInput(format!("{source} contains no annotated tokens")));
    }
    Ok(out)
}

pub fn write_annotated_tokens(items: &[(TaggedToken, f64)], mut out: impl Write) -> std::io::Result<()> {
    for (tok, v) in items {
        writeln!(out, "{}\t{}\t{}", tok.text, tok.tag, v)?;
    }
    Ok(())
}

/// Pairs every corpus token found in `lexicon` with its score.
pub fn annotate_with_lexicon(corpus: &TaggedCorpus, lexicon: &PolarityLexicon) -> Vec<(TaggedToken, f64)> {
    corpus
        .documents
        .iter()
        .flat_map(|d| d.tokens.iter())
        .filter_map(|t| lexicon.get(&t.text).map(|s| (t.clone(), s)))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreqTable {
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
}

impl FreqTable {
    pub fn get(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

pub fn count_frequencies(corpus: &TaggedCorpus) -> FreqTable {
    let mut table = FreqTable::default();
    for tok in corpus.documents.iter().flat_map(|d| d.tokens.iter()) {
        *table.counts.entry(tok.text.clone()).or_insert(0) += 1;
        table.total += 1;
    }
    table
}
