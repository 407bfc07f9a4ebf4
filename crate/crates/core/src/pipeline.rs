//! End-to-end composition: corpus → embeddings → point words → axis →
//! orientation lexicon → evaluation, with stage-attributed errors.

use std::fs;
use std::path::{Path, PathBuf};

use crate::axis::{
    build_distance_matrix, build_reference_vectors, correlate_with_gold, orient_by_seed, partition_agreement,
    partition_by_lexicon, partition_by_origin, principal_axis, score_vocabulary, AxisMode, AxisProjection,
    OrientationLexicon, SentimentAxis,
};
use crate::corpus::{load_polarity_lexicon, load_tagged_corpus, CorpusFormat, PolarityLexicon, TaggedCorpus};
use crate::embedding::{load_embeddings, save_embeddings, train_sgns, EmbeddingTable, SgnsConfig};
use crate::error::{Error, Result, StageExt};
use crate::eval::{evaluate, EvalReport};
use crate::pattern::{builtin_rules, extract_phrases, select_point_words, write_point_words, PhraseOccurrence, PointWordSet};

#[derive(Clone, Debug, PartialEq)]
pub struct InductionConfig {
    pub mode: AxisMode,
    pub cutoff: usize,
    pub seed_word: String,
}

/// Everything produced between point-word selection and scoring.
#[derive(Clone, Debug)]
pub struct InducedLexicon {
    pub points: PointWordSet,
    /// Absent in semi-supervised mode when PCA could not run.
    pub projection: Option<AxisProjection>,
    pub axis: SentimentAxis,
    pub lexicon: OrientationLexicon,
    /// Point words without an embedding.
    pub dropped_points: Vec<String>,
    /// Point words the polarity lexicon could not place.
    pub unplaced_points: Vec<String>,
}

pub fn induce_lexicon(
    corpus: &TaggedCorpus,
    phrases: &[PhraseOccurrence],
    table: &EmbeddingTable,
    polarity: Option<&PolarityLexicon>,
    cfg: &InductionConfig,
) -> Result<InducedLexicon> {
    let points = select_point_words(phrases, corpus, cfg.cutoff).stage("select-points")?;
    let built = build_axis(&points, table, polarity, cfg.mode, &cfg.seed_word)?;
    let lexicon = score_vocabulary(&built.axis, table).stage("scoring")?;
    Ok(InducedLexicon {
        points,
        projection: built.projection,
        axis: built.axis,
        lexicon,
        dropped_points: built.dropped_points,
        unplaced_points: built.unplaced_points,
    })
}

#[derive(Clone, Debug)]
pub struct AxisBuild {
    pub projection: Option<AxisProjection>,
    pub axis: SentimentAxis,
    pub dropped_points: Vec<String>,
    pub unplaced_points: Vec<String>,
}

/// Distance matrix, partition, reference vectors and seed orientation.
pub fn build_axis(
    points: &PointWordSet,
    table: &EmbeddingTable,
    polarity: Option<&PolarityLexicon>,
    mode: AxisMode,
    seed_word: &str,
) -> Result<AxisBuild> {
    let dm = build_distance_matrix(points, table).stage("distance-matrix");
    let (projection, partition, dropped_points) = match mode {
        AxisMode::Unsupervised => {
            let dm = dm?;
            let proj = principal_axis(&dm).stage("pca")?;
            let partition = partition_by_origin(&proj).stage("partition")?;
            (Some(proj), partition, dm.dropped)
        }
        AxisMode::SemiSupervised => {
            let lex = polarity
                .ok_or_else(|| Error::Config("semi-supervised mode needs a polarity lexicon".into()))
                .stage("partition")?;
            let partition = partition_by_lexicon(points, lex).stage("partition")?;
            let (proj, dropped) = match dm {
                Ok(dm) => (principal_axis(&dm).ok(), dm.dropped),
                Err(_) => (None, points.words.iter().filter(|w| !table.contains(w)).cloned().collect()),
            };
            (proj, partition, dropped)
        }
    };
    let unplaced_points = partition.dropped.clone();
    let refs = build_reference_vectors(partition, table).stage("reference-vectors")?;
    let axis = orient_by_seed(refs, table, seed_word).stage("orientation")?;
    Ok(AxisBuild {
        projection,
        axis,
        dropped_points,
        unplaced_points,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum EmbeddingSource {
    Train(SgnsConfig),
    Load(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub corpus: PathBuf,
    pub reviews: PathBuf,
    pub embeddings: EmbeddingSource,
    pub mode: AxisMode,
    pub cutoff: usize,
    pub seed_word: String,
    /// External polarity lexicon; required in semi-supervised mode and used
    /// for the gold correlation diagnostic when present.
    pub lexicon: Option<PathBuf>,
    pub neutral_threshold: f64,
    /// Drop reviews without a gold label instead of failing.
    pub drop_unlabeled: bool,
    pub out_dir: Option<PathBuf>,
    /// Also write the trained vectors to the output directory.
    pub save_embeddings: bool,
}

impl PipelineConfig {
    pub fn new(corpus: impl Into<PathBuf>, reviews: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            corpus: corpus.into(),
            reviews: reviews.into(),
            embeddings: EmbeddingSource::Train(SgnsConfig::default()),
            mode: AxisMode::Unsupervised,
            cutoff: 5,
            seed_word: crate::axis::DEFAULT_SEED.to_string(),
            lexicon: None,
            neutral_threshold: 0.0,
            drop_unlabeled: false,
            out_dir: None,
            save_embeddings: false,
        }
    }
}

pub struct PipelineOutcome {
    pub report: EvalReport,
    pub induced: InducedLexicon,
    pub table: EmbeddingTable,
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineOutcome> {
    if config.mode == AxisMode::SemiSupervised && config.lexicon.is_none() {
        return Err(Error::Config("semi-supervised mode needs --lexicon".into()));
    }
    let corpus = load_tagged_corpus(&config.corpus, CorpusFormat::from_path(&config.corpus)).stage("load-corpus")?;
    let mut reviews =
        load_tagged_corpus(&config.reviews, CorpusFormat::from_path(&config.reviews)).stage("load-reviews")?;
    if config.drop_unlabeled {
        reviews = reviews.labeled_only();
    }
    let polarity = match &config.lexicon {
        Some(p) => Some(
            load_polarity_lexicon(p)
                .stage("load-lexicon")?
                .with_threshold(config.neutral_threshold),
        ),
        None => None,
    };
    let table = match &config.embeddings {
        EmbeddingSource::Train(sgns) => train_sgns(&corpus, sgns).stage("embeddings")?,
        EmbeddingSource::Load(p) => load_embeddings(p).stage("embeddings")?,
    };
    let induction = InductionConfig {
        mode: config.mode,
        cutoff: config.cutoff,
        seed_word: config.seed_word.clone(),
    };
    let (induced, report) = run_on(&corpus, &reviews, &table, polarity.as_ref(), &induction)?;
    if let Some(dir) = &config.out_dir {
        write_outputs(dir, &induced, &report).stage("write-output")?;
        if config.save_embeddings {
            save_embeddings(&table, dir.join("embeddings.txt")).stage("write-output")?;
        }
    }
    Ok(PipelineOutcome { report, induced, table })
}

/// Induction and evaluation over loaded inputs; the report carries a
/// snapshot of the configuration and diagnostics.
pub fn run_on(
    corpus: &TaggedCorpus,
    reviews: &TaggedCorpus,
    table: &EmbeddingTable,
    polarity: Option<&PolarityLexicon>,
    cfg: &InductionConfig,
) -> Result<(InducedLexicon, EvalReport)> {
    let phrases = extract_phrases(corpus, &builtin_rules());
    let induced = induce_lexicon(corpus, &phrases, table, polarity, cfg)?;
    log::info!(
        "{} phrases, {} point words, axis {}+/{}-, {} words scored",
        phrases.len(),
        induced.points.len(),
        induced.axis.pos_words.len(),
        induced.axis.neg_words.len(),
        induced.lexicon.len()
    );
    let mut report = evaluate(&reviews.documents, &induced.lexicon).stage("evaluate")?;
    let seed_so = induced.lexicon.get(&cfg.seed_word).unwrap_or(f64::NAN);
    report = report
        .with_config("mode", cfg.mode)
        .with_config("cutoff", cfg.cutoff)
        .with_config("seed_word", &cfg.seed_word)
        .with_config("seed_so", seed_so)
        .with_config("corpus", corpus.fingerprint())
        .with_config("reviews", reviews.fingerprint())
        .with_config("phrases", phrases.len())
        .with_config("k_point_words", induced.points.len())
        .with_config("pos_words", induced.axis.pos_words.len())
        .with_config("neg_words", induced.axis.neg_words.len())
        .with_config("dropped_points", induced.dropped_points.len())
        .with_config("unplaced_points", induced.unplaced_points.len())
        .with_config("lexicon_size", induced.lexicon.len())
        .with_config("partition_agreement", partition_agreement(&induced.axis, &induced.lexicon))
        .with_config("embedding", table.fingerprint());
    for (k, v) in &table.metadata {
        report = report.with_config(format!("embedding.{k}"), v);
    }
    if let Some(proj) = &induced.projection {
        report = report
            .with_config("explained_variance.pc1", proj.explained_variance.0)
            .with_config("explained_variance.pc2", proj.explained_variance.1);
        if let Some(gold) = polarity {
            match correlate_with_gold(proj, gold) {
                Ok(r) => report = report.with_config("gold_correlation", r),
                Err(e) => log::warn!("gold correlation: {e}"),
            }
        }
    }
    Ok((induced, report))
}

/// Writes `lexicon.tsv`, `axis.tsv`, `points.tsv`, `projection.csv` (when
/// available) and `report.txt` into `dir`.
pub fn write_outputs(dir: &Path, induced: &InducedLexicon, report: &EvalReport) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    induced.lexicon.save(dir.join("lexicon.tsv"))?;
    induced.axis.save(dir.join("axis.tsv"))?;
    let points = dir.join("points.tsv");
    let mut buf = Vec::new();
    write_point_words(&induced.points, &mut buf).map_err(|e| Error::io(&points, e))?;
    fs::write(&points, buf).map_err(|e| Error::io(&points, e))?;
    if let Some(proj) = &induced.projection {
        let path = dir.join("projection.csv");
        let mut buf = Vec::new();
        proj.write_csv(&mut buf).map_err(|e| Error::io(&path, e))?;
        fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
    }
    report.save(dir.join("report.txt"))
}
