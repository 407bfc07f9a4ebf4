use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sentaxis::axis::{score_vocabulary, AxisMode, SentimentAxis, DEFAULT_SEED};
use sentaxis::corpus::{
    annotate_with_lexicon, load_annotated_tokens, load_polarity_lexicon, load_tagged_corpus, CorpusFormat,
    PolarityLexicon, TaggedCorpus,
};
use sentaxis::embedding::{load_embeddings, save_embeddings, train_sgns, EmbeddingTable, SgnsConfig};
use sentaxis::eval::{evaluate, evaluate_pmi, parse_cutoff_range, sweep_cutoffs, write_sweep_csv, SweepInputs, SweepMode};
use sentaxis::pattern::{
    builtin_rules, extract_phrases, load_phrases, load_point_words, select_point_words, tag_polarity_variance,
    write_phrases, write_point_words,
};
use sentaxis::pipeline::{build_axis, run_pipeline, EmbeddingSource, PipelineConfig};
use sentaxis::pmi::{build_near_index, write_hit_dump, CountMode, PmiSeeds, DEFAULT_WINDOW};
use sentaxis::{Error, Result};

/// Sentiment orientation lexicons from a sentiment axis in embedding space.
#[derive(Parser)]
#[command(name = "sentaxis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train skip-gram negative-sampling vectors on a tagged corpus.
    TrainEmbeddings {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        sgns: SgnsArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract two-word phrases with the POS-tag patterns.
    ExtractPhrases {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Select point words from phrases reaching a frequency cutoff.
    SelectPoints {
        #[arg(long)]
        phrases: PathBuf,
        /// Corpus the phrases were extracted from (for the tags).
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 5)]
        cutoff: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the sentiment axis from point words.
    BuildAxis {
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[command(flatten)]
        axis: AxisArgs,
        /// Output directory for axis.tsv and projection.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score every vocabulary word against an axis.
    Score {
        /// Axis directory (or axis.tsv file).
        #[arg(long)]
        axis: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify labeled reviews with an orientation lexicon.
    Classify {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        reviews: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Skip reviews without a gold label.
        #[arg(long)]
        drop_unlabeled: bool,
    },
    /// Accuracy over a range of cutoff frequencies.
    Sweep {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        reviews: PathBuf,
        /// Inclusive range such as 1..10.
        #[arg(long, default_value = "1..10")]
        cutoffs: String,
        /// unsup, semi or pmi.
        #[arg(long, default_value = "unsup")]
        mode: SweepMode,
        /// Precomputed vectors; trained from the corpus when absent.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[command(flatten)]
        sgns: SgnsArgs,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        neutral_threshold: f64,
        #[arg(long, default_value = DEFAULT_SEED)]
        seed_word: String,
        #[command(flatten)]
        pmi: PmiArgs,
        #[arg(long)]
        drop_unlabeled: bool,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Local PMI-IR baseline.
    PmiBaseline {
        /// Corpus to index.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        reviews: PathBuf,
        #[command(flatten)]
        pmi: PmiArgs,
        /// Same as --near-window.
        #[arg(long, conflicts_with = "near_window")]
        window: Option<usize>,
        #[arg(long)]
        report: PathBuf,
        /// Also write the positional index.
        #[arg(long)]
        index_out: Option<PathBuf>,
        /// Also write seed and phrase hit counts.
        #[arg(long)]
        hits_out: Option<PathBuf>,
        #[arg(long)]
        drop_unlabeled: bool,
    },
    /// Per-tag variance of token polarity values.
    TagVariance {
        /// "token<TAB>TAG<TAB>value" lines.
        #[arg(long, conflicts_with_all = ["corpus", "lexicon"])]
        annotated: Option<PathBuf>,
        /// Tagged corpus to annotate with --lexicon instead.
        #[arg(long, requires = "lexicon")]
        corpus: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline: embeddings, point words, axis, scoring, evaluation.
    Run {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        reviews: PathBuf,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[command(flatten)]
        sgns: SgnsArgs,
        #[command(flatten)]
        axis: AxisArgs,
        #[arg(long, default_value_t = 5)]
        cutoff: usize,
        #[arg(long)]
        drop_unlabeled: bool,
        /// Write the trained vectors next to the other outputs.
        #[arg(long)]
        save_embeddings: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SgnsArgs {
    #[arg(long, default_value_t = 100)]
    dim: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    learning_rate: f64,
    #[arg(long, default_value_t = 5)]
    min_count: u64,
    #[arg(long, default_value_t = 1e-3)]
    subsample: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl SgnsArgs {
    fn config(&self) -> SgnsConfig {
        SgnsConfig {
            dim: self.dim,
            window: self.window,
            negatives: self.negatives,
            epochs: self.epochs,
            initial_learning_rate: self.learning_rate,
            min_count: self.min_count,
            subsample_threshold: self.subsample,
            rng_seed: self.seed,
            threads: self.threads,
        }
    }
}

#[derive(Args)]
struct AxisArgs {
    /// unsup or semi.
    #[arg(long, default_value = "unsup")]
    mode: AxisMode,
    /// Polarity lexicon, required with --mode semi.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    neutral_threshold: f64,
    #[arg(long, default_value = DEFAULT_SEED)]
    seed_word: String,
}

#[derive(Args)]
struct PmiArgs {
    #[arg(long = "near-window", default_value_t = DEFAULT_WINDOW)]
    near_window: usize,
    /// Positive and negative seed, comma separated.
    #[arg(long, default_value = "excellent,poor")]
    seeds: String,
    /// document or token.
    #[arg(long, default_value = "document")]
    count_mode: CountMode,
}

impl PmiArgs {
    fn seeds(&self) -> Result<PmiSeeds> {
        let (pos, neg) = self
            .seeds
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("--seeds {:?} is not pos,neg", self.seeds)))?;
        Ok(PmiSeeds {
            pos: pos.trim().to_lowercase(),
            neg: neg.trim().to_lowercase(),
            mode: self.count_mode,
        })
    }
}

fn corpus(path: &Path) -> Result<TaggedCorpus> {
    load_tagged_corpus(path, CorpusFormat::from_path(path))
}

fn reviews(path: &Path, drop_unlabeled: bool) -> Result<TaggedCorpus> {
    let c = corpus(path)?;
    Ok(if drop_unlabeled { c.labeled_only() } else { c })
}

fn polarity(path: Option<&Path>, threshold: f64) -> Result<Option<PolarityLexicon>> {
    path.map(|p| Ok(load_polarity_lexicon(p)?.with_threshold(threshold)))
        .transpose()
}

fn write_file(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf).and_then(|_| fs::write(path, &buf)).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn embeddings(path: Option<&Path>, sgns: &SgnsArgs, corpus: &TaggedCorpus) -> Result<EmbeddingTable> {
    match path {
        Some(p) => load_embeddings(p),
        None => train_sgns(corpus, &sgns.config()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::TrainEmbeddings { corpus: c, sgns, out } => {
            let table = train_sgns(&corpus(&c)?, &sgns.config())?;
            save_embeddings(&table, &out)?;
            println!("{} vectors of dimension {}", table.len(), table.dim());
        }
        Command::ExtractPhrases { corpus: c, out } => {
            let phrases = extract_phrases(&corpus(&c)?, &builtin_rules());
            write_file(&out, |b| write_phrases(&phrases, b))?;
            println!("{} phrases", phrases.len());
        }
        Command::SelectPoints {
            phrases,
            corpus: c,
            cutoff,
            out,
        } => {
            let points = select_point_words(&load_phrases(&phrases)?, &corpus(&c)?, cutoff)?;
            write_file(&out, |b| write_point_words(&points, b))?;
            println!("{} point words at cutoff {cutoff}", points.len());
        }
        Command::BuildAxis {
            embeddings: e,
            points,
            axis,
            out,
        } => {
            if axis.mode == AxisMode::SemiSupervised && axis.lexicon.is_none() {
                return Err(Error::Config("--mode semi needs --lexicon".into()));
            }
            let table = load_embeddings(&e)?;
            let points = load_point_words(&points)?;
            let lex = polarity(axis.lexicon.as_deref(), axis.neutral_threshold)?;
            let built = build_axis(&points, &table, lex.as_ref(), axis.mode, &axis.seed_word)?;
            fs::create_dir_all(&out).map_err(|e| Error::Io {
                path: out.clone(),
                source: e,
            })?;
            built.axis.save(out.join("axis.tsv"))?;
            if let Some(proj) = &built.projection {
                write_file(&out.join("projection.csv"), |b| proj.write_csv(b))?;
            }
            println!(
                "{} positive and {} negative point words ({} without vectors, {} unplaced)",
                built.axis.pos_words.len(),
                built.axis.neg_words.len(),
                built.dropped_points.len(),
                built.unplaced_points.len()
            );
        }
        Command::Score { axis, embeddings: e, out } => {
            let path = if axis.is_dir() { axis.join("axis.tsv") } else { axis };
            let axis = SentimentAxis::load(&path)?;
            let lex = score_vocabulary(&axis, &load_embeddings(&e)?)?;
            lex.save(&out)?;
            println!("{} scored words", lex.len());
        }
        Command::Classify {
            lexicon,
            reviews: r,
            report,
            drop_unlabeled,
        } => {
            let lex = sentaxis::axis::OrientationLexicon::load(&lexicon)?;
            let rep = evaluate(&reviews(&r, drop_unlabeled)?.documents, &lex)?
                .with_config("lexicon_size", lex.len())
                .with_config("mode", lex.mode)
                .with_config("embedding", &lex.embedding_fingerprint);
            rep.save(&report)?;
            println!("accuracy {:.4} on {} reviews", rep.accuracy, rep.n_total);
        }
        Command::Sweep {
            corpus: c,
            reviews: r,
            cutoffs,
            mode,
            embeddings: e,
            sgns,
            lexicon,
            neutral_threshold,
            seed_word,
            pmi,
            drop_unlabeled,
            csv,
        } => {
            let range = parse_cutoff_range(&cutoffs)?;
            let train = corpus(&c)?;
            let test = reviews(&r, drop_unlabeled)?;
            let lex = polarity(lexicon.as_deref(), neutral_threshold)?;
            let phrases = extract_phrases(&train, &builtin_rules());
            let (table, index) = match mode {
                SweepMode::Pmi => (None, Some(build_near_index(&train, pmi.near_window)?)),
                _ => (Some(embeddings(e.as_deref(), &sgns, &train)?), None),
            };
            let inputs = SweepInputs {
                corpus: &train,
                phrases: &phrases,
                reviews: &test.documents,
                table: table.as_ref(),
                lexicon: lex.as_ref(),
                index: index.as_ref(),
                seed_word: &seed_word,
                pmi_seeds: pmi.seeds()?,
            };
            let rows = sweep_cutoffs(&inputs, mode, range)?;
            write_file(&csv, |b| write_sweep_csv(&rows, b))?;
            let mut stdout = std::io::stdout().lock();
            write_sweep_csv(&rows, &mut stdout).ok();
        }
        Command::PmiBaseline {
            corpus: c,
            reviews: r,
            pmi,
            window,
            report,
            index_out,
            hits_out,
            drop_unlabeled,
        } => {
            let train = corpus(&c)?;
            let test = reviews(&r, drop_unlabeled)?;
            let seeds = pmi.seeds()?;
            let index = build_near_index(&train, window.unwrap_or(pmi.near_window))?;
            let rep = evaluate_pmi(&test.documents, &index, &seeds, |_| true)?;
            rep.save(&report)?;
            if let Some(p) = index_out {
                index.save(p)?;
            }
            if let Some(p) = hits_out {
                let phrases: BTreeSet<(String, String)> = test
                    .documents
                    .iter()
                    .flat_map(|d| sentaxis::pattern::extract_from_tokens(&d.id, &d.tokens, &builtin_rules()))
                    .map(|p| (p.w1, p.w2))
                    .collect();
                write_file(&p, |b| write_hit_dump(&index, &phrases, &seeds, b))?;
            }
            println!("accuracy {:.4} on {} reviews", rep.accuracy, rep.n_total);
        }
        Command::TagVariance {
            annotated,
            corpus: c,
            lexicon,
            out,
        } => {
            let items = match (annotated, c, lexicon) {
                (Some(a), _, _) => load_annotated_tokens(&a)?,
                (None, Some(c), Some(l)) => annotate_with_lexicon(&corpus(&c)?, &load_polarity_lexicon(&l)?),
                _ => return Err(Error::Config("give --annotated, or --corpus with --lexicon".into())),
            };
            let report = tag_polarity_variance(&items)?;
            write_file(&out, |b| report.write_tsv(b))?;
            let mut stdout = std::io::stdout().lock();
            for (tag, share) in report.ranking().into_iter().take(10) {
                writeln!(stdout, "{tag}\t{share:.4}").ok();
            }
        }
        Command::Run {
            corpus: c,
            reviews: r,
            embeddings: e,
            sgns,
            axis,
            cutoff,
            drop_unlabeled,
            save_embeddings,
            out,
        } => {
            let config = PipelineConfig {
                embeddings: match e {
                    Some(p) => EmbeddingSource::Load(p),
                    None => EmbeddingSource::Train(sgns.config()),
                },
                mode: axis.mode,
                cutoff,
                seed_word: axis.seed_word,
                lexicon: axis.lexicon,
                neutral_threshold: axis.neutral_threshold,
                drop_unlabeled,
                out_dir: Some(out),
                save_embeddings,
                ..PipelineConfig::new(c, r)
            };
            let outcome = run_pipeline(&config)?;
            print!("{}", outcome.report);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
