//! Sentiment axis induction and word orientation scoring.
//!
//! Point words are split into two polarity sets, either by the sign of their
//! first principal component over the pairwise cosine-distance matrix
//! (unsupervised) or by the sign of an external polarity lexicon
//! (semi-supervised). Each set is averaged into a reference vector; the one
//! closer to the seed word becomes the positive reference. A word's
//! orientation is
//!
//! ```text
//! SO(w) = cos(vec_pos, w) - cos(vec_neg, w)
//!       = CosDst(vec_neg, w) - CosDst(vec_pos, w)
//! ```
//!
//! so positive words score above zero.

pub mod pca;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2, Axis};

use crate::corpus::PolarityLexicon;
use crate::embedding::{cosine_distance, cosine_similarity, EmbeddingTable};
use crate::error::{Error, Result};
use crate::pattern::PointWordSet;

pub use pca::{canonical_sign, EigenPair, PowerIteration};

pub const DEFAULT_SEED: &str = "excellent";
/// Reference-vector distances to the seed closer than this count as a tie.
pub const ORIENTATION_TIE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisMode {
    Unsupervised,
    SemiSupervised,
}

impl fmt::Display for AxisMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxisMode::Unsupervised => "unsup",
            AxisMode::SemiSupervised => "semi",
        })
    }
}

impl FromStr for AxisMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "unsup" | "unsupervised" => Ok(AxisMode::Unsupervised),
            "semi" | "semi-supervised" | "semisupervised" => Ok(AxisMode::SemiSupervised),
            other => Err(format!("unknown axis mode {other:?} (expected unsup or semi)")),
        }
    }
}

/// Pairwise cosine distances between point words.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    pub words: Vec<String>,
    pub d: Array2<f64>,
    /// Point words left out because the embedding table lacks them.
    pub dropped: Vec<String>,
}

impl DistanceMatrix {
    /// Validates a precomputed matrix: at least 3 words, square, symmetric,
    /// zero diagonal, entries in `[0, 2]`.
    pub fn new(words: Vec<String>, d: Array2<f64>) -> Result<Self> {
        let k = words.len();
        if k < 3 {
            return Err(Error::InsufficientData(format!("distance matrix needs at least 3 words, got {k}")));
        }
        if d.dim() != (k, k) {
            return Err(Error::Config(format!("matrix shape {:?} does not match {k} words", d.dim())));
        }
        for i in 0..k {
            if d[[i, i]] != 0.0 {
                return Err(Error::Config(format!("diagonal entry {i} is not zero")));
            }
            for j in 0..k {
                let v = d[[i, j]];
                if !(0.0..=2.0).contains(&v) || v != d[[j, i]] {
                    return Err(Error::Config(format!("entry ({i}, {j}) = {v} breaks symmetry or range")));
                }
            }
        }
        Ok(DistanceMatrix {
            words,
            d,
            dropped: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

pub fn build_distance_matrix(points: &PointWordSet, table: &EmbeddingTable) -> Result<DistanceMatrix> {
    let (words, dropped): (Vec<String>, Vec<String>) = points.words.iter().cloned().partition(|w| table.contains(w));
    if words.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} point word(s) are in the embedding vocabulary, need 3",
            words.len()
        )));
    }
    if !dropped.is_empty() {
        log::info!("{} point word(s) missing from the embeddings", dropped.len());
    }
    let k = words.len();
    let vectors: Vec<&[f64]> = words.iter().map(|w| table.vector(w)).collect::<Result<_>>()?;
    let mut d = Array2::zeros((k, k));
    for i in 0..k {
        for j in i + 1..k {
            let v = cosine_distance(vectors[i], vectors[j])?;
            d[[i, j]] = v;
            d[[j, i]] = v;
        }
    }
    Ok(DistanceMatrix { words, d, dropped })
}

/// Point words projected on the first two principal components.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisProjection {
    pub words: Vec<String>,
    pub pc1: Vec<f64>,
    pub pc2: Vec<f64>,
    /// Fraction of total variance captured by each component.
    pub explained_variance: (f64, f64),
    pub eigenvalues: (f64, f64),
    /// Unit principal directions in row space.
    pub components: (Vec<f64>, Vec<f64>),
}

impl AxisProjection {
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "word,pc1,pc2")?;
        for ((w, a), b) in self.words.iter().zip(&self.pc1).zip(&self.pc2) {
            writeln!(out, "{},{a},{b}", csv_field(w))?;
        }
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Rows of the distance matrix, column-mean centered.
pub fn centered_rows(dm: &DistanceMatrix) -> Array2<f64> {
    let means = dm.d.mean_axis(Axis(0)).expect("matrix has rows");
    &dm.d - &means.insert_axis(Axis(0))
}

pub fn principal_axis(dm: &DistanceMatrix) -> Result<AxisProjection> {
    principal_axis_with(dm, &PowerIteration::default())
}

pub fn principal_axis_with(dm: &DistanceMatrix, solver: &PowerIteration) -> Result<AxisProjection> {
    let k = dm.len();
    if k < 2 {
        return Err(Error::InsufficientData("PCA needs at least 2 words".into()));
    }
    let x = centered_rows(dm);
    let cov = x.t().dot(&x) / (k as f64 - 1.0);
    let total: f64 = cov.diag().sum();
    if total.is_nan() || total <= 1e-20 {
        return Err(Error::Degenerate("distance matrix rows have no variance after centering".into()));
    }
    let pairs = solver.top_eigenpairs(&cov, 2)?;
    let first = &pairs[0];
    if first.value <= 0.0 {
        return Err(Error::Degenerate("first principal component has zero variance".into()));
    }
    let zero = EigenPair {
        value: 0.0,
        vector: Array1::zeros(k),
        iterations: 0,
    };
    let second = pairs.get(1).unwrap_or(&zero);
    let pc1 = x.dot(&first.vector).to_vec();
    let pc2 = x.dot(&second.vector).to_vec();
    Ok(AxisProjection {
        words: dm.words.clone(),
        pc1,
        pc2,
        explained_variance: (first.value / total, second.value.max(0.0) / total),
        eigenvalues: (first.value, second.value),
        components: (first.vector.to_vec(), second.vector.to_vec()),
    })
}

/// Two polarity sets of point words, not yet oriented.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub set_a: Vec<String>,
    pub set_b: Vec<String>,
    /// Words that could not be placed (lexicon mode only).
    pub dropped: Vec<String>,
    pub mode: AxisMode,
}

/// `pc1 >= 0` goes to set A, `pc1 < 0` to set B.
pub fn partition_by_origin(proj: &AxisProjection) -> Result<Partition> {
    let mut set_a = Vec::new();
    let mut set_b = Vec::new();
    for (w, &v) in proj.words.iter().zip(&proj.pc1) {
        if v >= 0.0 {
            set_a.push(w.clone());
        } else {
            set_b.push(w.clone());
        }
    }
    if set_a.is_empty() || set_b.is_empty() {
        return Err(Error::Partition(format!(
            "principal axis puts all {} words on one side of zero",
            proj.words.len()
        )));
    }
    Ok(Partition {
        set_a,
        set_b,
        dropped: Vec::new(),
        mode: AxisMode::Unsupervised,
    })
}

/// Score above the lexicon's neutral threshold goes to set A, below to set
/// B; words at the threshold or absent from the lexicon are dropped.
pub fn partition_by_lexicon(points: &PointWordSet, lex: &PolarityLexicon) -> Result<Partition> {
    let mut part = Partition {
        set_a: Vec::new(),
        set_b: Vec::new(),
        dropped: Vec::new(),
        mode: AxisMode::SemiSupervised,
    };
    for w in &points.words {
        match lex.get(w) {
            Some(s) if s > lex.neutral_threshold => part.set_a.push(w.clone()),
            Some(s) if s < lex.neutral_threshold => part.set_b.push(w.clone()),
            _ => part.dropped.push(w.clone()),
        }
    }
    if part.set_a.is_empty() || part.set_b.is_empty() {
        return Err(Error::Partition(format!(
            "lexicon leaves {} positive and {} negative point words",
            part.set_a.len(),
            part.set_b.len()
        )));
    }
    Ok(part)
}

/// Component-wise mean of the in-vocabulary vectors of `words`.
pub fn mean_vector(words: &[String], table: &EmbeddingTable) -> Result<Vec<f64>> {
    let mut sum = vec![0.0; table.dim()];
    let mut n = 0usize;
    for v in words.iter().filter_map(|w| table.get(w)) {
        sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
        n += 1;
    }
    if n == 0 {
        return Err(Error::InsufficientData("no word of the set is in the embedding vocabulary".into()));
    }
    sum.iter_mut().for_each(|s| *s /= n as f64);
    if sum.iter().all(|&x| x == 0.0) {
        return Err(Error::Degenerate("reference vector is the zero vector".into()));
    }
    Ok(sum)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceVectors {
    pub partition: Partition,
    pub vec_a: Vec<f64>,
    pub vec_b: Vec<f64>,
}

pub fn build_reference_vectors(partition: Partition, table: &EmbeddingTable) -> Result<ReferenceVectors> {
    let vec_a = mean_vector(&partition.set_a, table)?;
    let vec_b = mean_vector(&partition.set_b, table)?;
    Ok(ReferenceVectors { partition, vec_a, vec_b })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SentimentAxis {
    pub pos_words: Vec<String>,
    pub neg_words: Vec<String>,
    pub vec_pos: Vec<f64>,
    pub vec_neg: Vec<f64>,
    pub seed: String,
    pub mode: AxisMode,
}

impl SentimentAxis {
    /// The same axis with the two references exchanged.
    pub fn swapped(&self) -> SentimentAxis {
        SentimentAxis {
            pos_words: self.neg_words.clone(),
            neg_words: self.pos_words.clone(),
            vec_pos: self.vec_neg.clone(),
            vec_neg: self.vec_pos.clone(),
            seed: self.seed.clone(),
            mode: self.mode,
        }
    }

    pub fn orientation_of(&self, vector: &[f64]) -> Result<f64> {
        Ok(cosine_similarity(&self.vec_pos, vector)? - cosine_similarity(&self.vec_neg, vector)?)
    }

    pub fn write_tsv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "[mode]\n{}", self.mode)?;
        writeln!(out, "[seed]\n{}", self.seed)?;
        writeln!(out, "[pos_words]")?;
        for w in &self.pos_words {
            writeln!(out, "{w}")?;
        }
        writeln!(out, "[neg_words]")?;
        for w in &self.neg_words {
            writeln!(out, "{w}")?;
        }
        writeln!(out, "[vectors]")?;
        for (name, v) in [("vec_pos", &self.vec_pos), ("vec_neg", &self.vec_neg)] {
            write!(out, "{name}")?;
            for x in v {
                write!(out, "\t{x}")?;
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

    pub fn load(path: impl AsRef<Path>) -> Result<SentimentAxis> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SentimentAxis::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<SentimentAxis> {
        let mut section = String::new();
        let mut mode = None;
        let mut seed = None;
        let mut pos_words = Vec::new();
        let mut neg_words = Vec::new();
        let mut vectors: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.to_string();
                continue;
            }
            let bad = |m: String| Error::parse(source, idx + 1, m);
            match section.as_str() {
                "mode" => mode = Some(line.parse::<AxisMode>().map_err(bad)?),
                "seed" => seed = Some(line.to_string()),
                "pos_words" => pos_words.push(line.to_string()),
                "neg_words" => neg_words.push(line.to_string()),
                "vectors" => {
                    let mut fields = line.split('\t');
                    let name = fields.next().unwrap_or_default().to_string();
                    let values = fields
                        .map(|f| f.parse::<f64>().map_err(|_| bad(format!("{f:?} is not a number"))))
                        .collect::<Result<Vec<_>>>()?;
                    vectors.insert(name, values);
                }
                other => return Err(bad(format!("line outside a known section ({other:?})"))),
            }
        }
        let missing = |what: &str| Error::parse(source, 0, format!("axis file lacks {what}"));
        let vec_pos = vectors.remove("vec_pos").ok_or_else(|| missing("vec_pos"))?;
        let vec_neg = vectors.remove("vec_neg").ok_or_else(|| missing("vec_neg"))?;
        if vec_pos.len() != vec_neg.len() || vec_pos.is_empty() {
            return Err(Error::parse(source, 0, "reference vectors differ in length"));
        }
        Ok(SentimentAxis {
            pos_words,
            neg_words,
            vec_pos,
            vec_neg,
            seed: seed.ok_or_else(|| missing("seed"))?,
            mode: mode.ok_or_else(|| missing("mode"))?,
        })
    }
}

/// The reference closer (in cosine distance) to the seed word becomes the
/// positive one.
pub fn orient_by_seed(refs: ReferenceVectors, table: &EmbeddingTable, seed: &str) -> Result<SentimentAxis> {
    let seed_vec = table.get(seed).ok_or_else(|| Error::SeedMissing(seed.to_string()))?;
    let dist_a = cosine_distance(&refs.vec_a, seed_vec)?;
    let dist_b = cosine_distance(&refs.vec_b, seed_vec)?;
    if (dist_a - dist_b).abs() < ORIENTATION_TIE {
        return Err(Error::OrientationAmbiguous { seed: seed.to_string() });
    }
    let ReferenceVectors { partition, vec_a, vec_b } = refs;
    let (pos_words, neg_words, vec_pos, vec_neg) = if dist_a < dist_b {
        (partition.set_a, partition.set_b, vec_a, vec_b)
    } else {
        (partition.set_b, partition.set_a, vec_b, vec_a)
    };
    Ok(SentimentAxis {
        pos_words,
        neg_words,
        vec_pos,
        vec_neg,
        seed: seed.to_string(),
        mode: partition.mode,
    })
}

pub fn sentiment_orientation(word: &str, axis: &SentimentAxis, table: &EmbeddingTable) -> Result<f64> {
    axis.orientation_of(table.vector(word)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrientationLexicon {
    pub scores: BTreeMap<String, f64>,
    pub embedding_fingerprint: String,
    pub mode: AxisMode,
    pub seed: String,
    /// Zero vectors, which have no orientation.
    pub skipped: Vec<String>,
}

impl OrientationLexicon {
    pub fn get(&self, word: &str) -> Option<f64> {
        self.scores.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Every score shifted by `c`.
    pub fn shifted(&self, c: f64) -> OrientationLexicon {
        let mut out = self.clone();
        out.scores.values_mut().for_each(|v| *v += c);
        out
    }

    pub fn write_tsv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(
            out,
            "# embedding={} mode={} seed={}",
            self.embedding_fingerprint, self.mode, self.seed
        )?;
        for (w, s) in &self.scores {
            writeln!(out, "{w}\t{s}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).map_err(|e| Error::io(path, e))?;
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<OrientationLexicon> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let source = path.display().to_string();
        let mut lex = OrientationLexicon {
            scores: BTreeMap::new(),
            embedding_fingerprint: String::new(),
            mode: AxisMode::Unsupervised,
            seed: DEFAULT_SEED.to_string(),
            skipped: Vec::new(),
        };
        for (idx, line) in text.lines().enumerate() {
            if let Some(header) = line.strip_prefix("# ") {
                for kv in header.split_whitespace() {
                    match kv.split_once('=') {
                        Some(("embedding", v)) => lex.embedding_fingerprint = v.to_string(),
                        Some(("mode", v)) => lex.mode = v.parse().map_err(|m| Error::parse(&source, idx + 1, m))?,
                        Some(("seed", v)) => lex.seed = v.to_string(),
                        _ => {}
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (w, s) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(&source, idx + 1, "expected \"word<TAB>SO\""))?;
            let s: f64 = s
                .parse()
                .map_err(|_| Error::parse(&source, idx + 1, format!("{s:?} is not a number")))?;
            lex.scores.insert(w.to_string(), s);
        }
        if lex.scores.is_empty() {
            return Err(Error::EmptyInput(format!("{source} has no orientation scores")));
        }
        Ok(lex)
    }
}

pub fn score_vocabulary(axis: &SentimentAxis, table: &EmbeddingTable) -> Result<OrientationLexicon> {
    if axis.vec_pos.len() != table.dim() {
        return Err(Error::Config(format!(
            "axis dimension {} does not match embedding dimension {}",
            axis.vec_pos.len(),
            table.dim()
        )));
    }
    let mut scores = BTreeMap::new();
    let mut skipped = Vec::new();
    for (w, v) in table.iter() {
        match axis.orientation_of(v) {
            Ok(s) => {
                scores.insert(w.to_string(), s);
            }
            Err(Error::Degenerate(_)) => skipped.push(w.to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok(OrientationLexicon {
        scores,
        embedding_fingerprint: table.fingerprint(),
        mode: axis.mode,
        seed: axis.seed.clone(),
        skipped,
    })
}

/// Fraction of point words whose score sign agrees with their partition.
pub fn partition_agreement(axis: &SentimentAxis, lex: &OrientationLexicon) -> f64 {
    let pos = axis.pos_words.iter().filter_map(|w| lex.get(w)).map(|s| (s >= 0.0) as usize);
    let neg = axis.neg_words.iter().filter_map(|w| lex.get(w)).map(|s| (s < 0.0) as usize);
    let (hits, n) = pos.chain(neg).fold((0, 0), |(h, n), x| (h + x, n + 1));
    if n == 0 {
        0.0
    } else {
        hits as f64 / n as f64
    }
}

/// Absolute Pearson correlation between `pc1` and gold scores over the
/// shared words.
pub fn correlate_with_gold(proj: &AxisProjection, gold: &PolarityLexicon) -> Result<f64> {
    let pairs: Vec<(f64, f64)> = proj
        .words
        .iter()
        .zip(&proj.pc1)
        .filter_map(|(w, &x)| gold.get(w).map(|g| (x, g)))
        .collect();
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} word(s) shared between projection and gold scores, need 2",
            pairs.len()
        )));
    }
    pearson(&pairs).map(f64::abs)
}

pub fn pearson(pairs: &[(f64, f64)]) -> Result<f64> {
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("one side has zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Words of `points` in the embedding table, for reporting.
pub fn in_vocabulary(points: &PointWordSet, table: &EmbeddingTable) -> BTreeSet<String> {
    points.words.iter().filter(|w| table.contains(w)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn words(ws: &[&str]) -> Vec<String> {
        ws.iter().map(|s| s.to_string()).collect()
    }

    fn points(ws: &[&str]) -> PointWordSet {
        PointWordSet {
            words: ws.iter().map(|s| s.to_string()).collect(),
            cutoff: 1,
            ..PointWordSet::default()
        }
    }

    fn projection(ws: &[&str], pc1: &[f64]) -> AxisProjection {
        AxisProjection {
            words: words(ws),
            pc1: pc1.to_vec(),
            pc2: vec![0.0; pc1.len()],
            explained_variance: (1.0, 0.0),
            eigenvalues: (1.0, 0.0),
            components: (vec![], vec![]),
        }
    }

    #[test]
    fn identical_vectors_have_zero_distance() {
        let t = EmbeddingTable::from_rows(
            2,
            vec![("a", vec![1.0, 1.0]), ("b", vec![2.0, 2.0]), ("c", vec![1.0, -1.0])],
        )
        .unwrap();
        let dm = build_distance_matrix(&points(&["a", "b", "c"]), &t).unwrap();
        assert_abs_diff_eq!(dm.d[[0, 1]], 0.0, epsilon = 1e-15);
        assert_eq!(dm.d[[0, 0]], 0.0);
        assert_eq!(dm.d[[0, 2]], dm.d[[2, 0]]);
    }

    #[test]
    fn too_few_in_vocabulary_points() {
        let t = EmbeddingTable::from_rows(2, vec![("a", vec![1.0, 0.0]), ("b", vec![0.0, 1.0])]).unwrap();
        let err = build_distance_matrix(&points(&["a", "b", "zz"]), &t).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn oov_points_dropped_and_reported() {
        let t = EmbeddingTable::from_rows(
            2,
            vec![("a", vec![1.0, 0.0]), ("b", vec![0.0, 1.0]), ("c", vec![1.0, 1.0])],
        )
        .unwrap();
        let dm = build_distance_matrix(&points(&["a", "b", "c", "zz"]), &t).unwrap();
        assert_eq!(dm.words, words(&["a", "b", "c"]));
        assert_eq!(dm.dropped, words(&["zz"]));
    }

    #[test]
    fn identical_rows_are_degenerate() {
        let d = Array2::zeros((4, 4));
        let dm = DistanceMatrix::new(words(&["a", "b", "c", "d"]), d).unwrap();
        assert!(matches!(principal_axis(&dm), Err(Error::Degenerate(_))));
    }

    #[test]
    fn two_clusters_put_all_variance_on_pc1() {
        // only two distinct rows, so the centered rows lie on a line
        let t = EmbeddingTable::from_rows(
            2,
            vec![
                ("a", vec![1.0, 0.0]),
                ("b", vec![2.0, 0.0]),
                ("c", vec![0.5, 0.0]),
                ("d", vec![0.0, 1.0]),
                ("e", vec![0.0, 3.0]),
            ],
        )
        .unwrap();
        let dm = build_distance_matrix(&points(&["a", "b", "c", "d", "e"]), &t).unwrap();
        let proj = principal_axis(&dm).unwrap();
        assert_abs_diff_eq!(proj.explained_variance.0, 1.0, epsilon = 1e-9);
        let part = partition_by_origin(&proj).unwrap();
        let mut sets = [part.set_a, part.set_b];
        sets.sort();
        assert_eq!(sets, [words(&["a", "b", "c"]), words(&["d", "e"])]);
    }

    #[test]
    fn origin_partition_rules() {
        let p = partition_by_origin(&projection(&["w1", "w2"], &[0.5, -0.5])).unwrap();
        assert_eq!(p.set_a, words(&["w1"]));
        assert_eq!(p.set_b, words(&["w2"]));
        let p = partition_by_origin(&projection(&["w1", "w2"], &[0.0, -0.1])).unwrap();
        assert_eq!(p.set_a, words(&["w1"]));
        let err = partition_by_origin(&projection(&["w1", "w2"], &[0.1, 0.2])).unwrap_err();
        assert!(matches!(err, Error::Partition(_)));
    }

    #[test]
    fn lexicon_partition_rules() {
        let lex = PolarityLexicon::from_entries([("good", 1.2), ("bad", -0.8), ("meh", 0.0)]);
        let p = partition_by_lexicon(&points(&["good", "bad", "meh", "unknown"]), &lex).unwrap();
        assert_eq!(p.set_a, words(&["good"]));
        assert_eq!(p.set_b, words(&["bad"]));
        assert_eq!(p.dropped, words(&["meh", "unknown"]));
        let err = partition_by_lexicon(&points(&["good"]), &lex).unwrap_err();
        assert!(matches!(err, Error::Partition(_)));
        // threshold shifts the boundary
        let lex = lex.with_threshold(1.5);
        assert!(partition_by_lexicon(&points(&["good", "bad"]), &lex).is_err());
    }

    fn plane() -> EmbeddingTable {
        EmbeddingTable::from_rows(
            2,
            vec![
                ("x", vec![1.0, 0.0]),
                ("y", vec![0.0, 1.0]),
                ("excellent", vec![1.0, 0.2]),
                ("zero", vec![0.0, 0.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn reference_means() {
        let t = plane();
        assert_eq!(mean_vector(&words(&["x"]), &t).unwrap(), vec![1.0, 0.0]);
        assert_eq!(mean_vector(&words(&["x", "y"]), &t).unwrap(), vec![0.5, 0.5]);
        assert!(matches!(mean_vector(&words(&["nope"]), &t), Err(Error::InsufficientData(_))));
        assert!(matches!(mean_vector(&words(&["zero"]), &t), Err(Error::Degenerate(_))));
    }

    fn refs(a: Vec<f64>, b: Vec<f64>) -> ReferenceVectors {
        ReferenceVectors {
            partition: Partition {
                set_a: words(&["a"]),
                set_b: words(&["b"]),
                dropped: vec![],
                mode: AxisMode::Unsupervised,
            },
            vec_a: a,
            vec_b: b,
        }
    }

    #[test]
    fn seed_orientation() {
        let t = plane();
        let axis = orient_by_seed(refs(vec![0.0, 1.0], vec![1.0, 0.2]), &t, "excellent").unwrap();
        assert_eq!(axis.vec_pos, vec![1.0, 0.2]);
        assert_eq!(axis.pos_words, words(&["b"]));

        let err = orient_by_seed(refs(vec![1.0, 0.0], vec![0.0, 1.0]), &t, "missing").unwrap_err();
        assert!(matches!(err, Error::SeedMissing(_)));

        // mirror images around the seed direction (1, 0)
        let t = EmbeddingTable::from_rows(2, vec![("excellent", vec![1.0, 0.0])]).unwrap();
        let err = orient_by_seed(refs(vec![1.0, 1.0], vec![1.0, -1.0]), &t, "excellent").unwrap_err();
        assert!(matches!(err, Error::OrientationAmbiguous { .. }));
    }

    #[test]
    fn orientation_values() {
        let axis = SentimentAxis {
            pos_words: vec![],
            neg_words: vec![],
            vec_pos: vec![1.0, 0.0],
            vec_neg: vec![0.0, 1.0],
            seed: "excellent".into(),
            mode: AxisMode::Unsupervised,
        };
        // equidistant
        assert_abs_diff_eq!(axis.orientation_of(&[1.0, 1.0]).unwrap(), 0.0);
        // along vec_pos: 1 - cos(vec_neg, vec_pos)
        assert_abs_diff_eq!(axis.orientation_of(&[2.0, 0.0]).unwrap(), 1.0);
        assert_eq!(
            axis.swapped().orientation_of(&[0.3, 0.7]).unwrap(),
            -axis.orientation_of(&[0.3, 0.7]).unwrap()
        );
    }

    #[test]
    fn correlation_is_absolute() {
        let proj = projection(&["a", "b", "c"], &[0.1, -0.4, 0.9]);
        let same = PolarityLexicon::from_entries([("a", 0.1), ("b", -0.4), ("c", 0.9)]);
        let neg = PolarityLexicon::from_entries([("a", -0.1), ("b", 0.4), ("c", -0.9)]);
        assert_abs_diff_eq!(correlate_with_gold(&proj, &same).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(correlate_with_gold(&proj, &neg).unwrap(), 1.0, epsilon = 1e-12);
        let flat = PolarityLexicon::from_entries([("a", 1.0), ("b", 1.0)]);
        assert!(matches!(correlate_with_gold(&proj, &flat), Err(Error::UndefinedCorrelation(_))));
        let one = PolarityLexicon::from_entries([("a", 1.0)]);
        assert!(matches!(correlate_with_gold(&proj, &one), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn axis_file_round_trip() {
        let axis = SentimentAxis {
            pos_words: words(&["good", "great"]),
            neg_words: words(&["bad"]),
            vec_pos: vec![0.1, -2.5e-7, 3.0],
            vec_neg: vec![-1.0, 0.25, 1e10],
            seed: "excellent".into(),
            mode: AxisMode::SemiSupervised,
        };
        let mut buf = Vec::new();
        axis.write_tsv(&mut buf).unwrap();
        let back = SentimentAxis::parse(std::str::from_utf8(&buf).unwrap(), "t").unwrap();
        assert_eq!(back, axis);
    }

    #[test]
    fn distance_matrix_validation() {
        let bad = array![[0.0, 1.0, 0.5], [0.9, 0.0, 0.5], [0.5, 0.5, 0.0]];
        assert!(DistanceMatrix::new(words(&["a", "b", "c"]), bad).is_err());
        let small = array![[0.0, 1.0], [1.0, 0.0]];
        assert!(DistanceMatrix::new(words(&["a", "b"]), small).is_err());
    }
}
