//! Dense word vectors: storage, the plain-text vector format, cosine
//! geometry and a skip-gram negative-sampling trainer.

mod sgns;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use sgns::{sgns_loss, sgns_step, train_sgns, SgnsConfig, SgnsSample};

/// Word vectors of a fixed dimension, stored unnormalized in insertion order.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    /// Free-form provenance, e.g. the training configuration.
    pub metadata: BTreeMap<String, String>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        Ok(EmbeddingTable {
            dim,
            words: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            metadata: BTreeMap::new(),
        })
    }

    pub fn from_rows<I, S>(dim: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut table = EmbeddingTable::new(dim)?;
        for (word, vector) in rows {
            table.insert(word, &vector)?;
        }
        Ok(table)
    }

    /// Appends a word. Rejects empty or repeated words, wrong lengths and
    /// non-finite components.
    pub fn insert(&mut self, word: impl Into<String>, vector: &[f64]) -> Result<()> {
        let word = word.into();
        if word.is_empty() {
            return Err(Error::Config("empty word in embedding table".into()));
        }
        if vector.len() != self.dim {
            return Err(Error::Config(format!(
                "vector for {word:?} has length {}, table dimension is {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(format!("vector for {word:?} has non-finite entries")));
        }
        if self.index.contains_key(&word) {
            return Err(Error::Config(format!("duplicate word {word:?} in embedding table")));
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.data.extend_from_slice(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&i| self.row(i))
    }

    /// Like [`get`](Self::get) but reports an out-of-vocabulary error.
    pub fn vector(&self, word: &str) -> Result<&[f64]> {
        self.get(word).ok_or_else(|| Error::OutOfVocabulary(word.to_string()))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.words.iter().enumerate().map(move |(i, w)| (w.as_str(), self.row(i)))
    }

    /// Every component multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> EmbeddingTable {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// Short SHA-256 digest of words and vector bits.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.dim as u64).to_le_bytes());
        for (word, vec) in self.iter() {
            hasher.update(word.as_bytes());
            hasher.update([0u8]);
            for v in vec {
                hasher.update(v.to_bits().to_le_bytes());
            }
        }
        hex::encode(&hasher.finalize()[..8])
    }
}

/// Writes the text vector format: a `count dim` header, then one
/// `word v1 ... v_dim` row per word. Floats use the shortest representation
/// that parses back to the same value.
pub fn write_embeddings(table: &EmbeddingTable, out: impl Write) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "{} {}", table.len(), table.dim())?;
    for (word, vec) in table.iter() {
        out.write_all(word.as_bytes())?;
        for v in vec {
            write!(out, " {v}")?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn save_embeddings(table: &EmbeddingTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_embeddings(table, file).map_err(|e| Error::io(path, e))
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_embeddings(&text, &path.display().to_string())
}

/// Parses the text vector format. A file without the `count dim` header
/// (GloVe's native output) is accepted; the dimension then comes from the
/// first row.
pub fn parse_embeddings(text: &str, source: &str) -> Result<EmbeddingTable> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).peekable();
    let Some(&(_, first)) = lines.peek() else {
        return Err(Error::EmptyInput(format!("{source} contains no vectors")));
    };

    let header: Vec<&str> = first.split_whitespace().collect();
    let declared = match header.as_slice() {
        [count, dim] => match (count.parse::<usize>(), dim.parse::<usize>()) {
            (Ok(c), Ok(d)) => Some((c, d)),
            _ => None,
        },
        _ => None,
    };
    let dim = match declared {
        Some((_, d)) => {
            lines.next();
            d
        }
        None => header.len().saturating_sub(1),
    };
    if dim == 0 {
        return Err(Error::parse(source, 1, "cannot determine vector dimension"));
    }

    let mut table = EmbeddingTable::new(dim)?;
    let mut values = Vec::with_capacity(dim);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let mut fields = line.split(' ').filter(|f| !f.is_empty());
        let word = fields.next().unwrap_or_default();
        values.clear();
        for f in fields {
            let v: f64 = f
                .parse()
                .map_err(|_| Error::parse(source, lineno, format!("row {word:?}: {f:?} is not a number")))?;
            values.push(v);
        }
        if values.len() != dim {
            return Err(Error::parse(
                source,
                lineno,
                format!("row {word:?} has {} values, expected {dim}", values.len()),
            ));
        }
        table
            .insert(word, &values)
            .map_err(|e| Error::parse(source, lineno, e.to_string()))?;
    }
    if let Some((count, _)) = declared {
        if count != table.len() {
            return Err(Error::parse(
                source,
                1,
                format!("header declares {count} rows, file has {}", table.len()),
            ));
        }
    }
    if table.is_empty() {
        return Err(Error::EmptyInput(format!("{source} contains no vectors")));
    }
    Ok(table)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `dot(a, b) / (|a| |b|)`, clamped to `[-1, 1]`.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Config(format!(
            "cosine of vectors with lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Degenerate("cosine of a zero vector".into()));
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

pub fn cosine_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    cosine_similarity(a, b).map(|s| 1.0 - s)
}

/// The `k` words most similar to `word`, excluding `word` itself. Ties are
/// broken by the word string.
pub fn nearest_neighbors(table: &EmbeddingTable, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let query = table.vector(word)?;
    let mut scored = Vec::with_capacity(table.len());
    for (other, vec) in table.iter() {
        if other == word {
            continue;
        }
        // Zero vectors cannot be ranked.
        if let Ok(sim) = cosine_similarity(query, vec) {
            scored.push((other.to_string(), sim));
        }
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored)
}
