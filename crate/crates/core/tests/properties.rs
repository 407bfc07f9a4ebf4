mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::sample::select;

use sentaxis::axis::{
    partition_by_lexicon, partition_by_origin, principal_axis, score_vocabulary, AxisMode, OrientationLexicon,
    SentimentAxis,
};
use sentaxis::corpus::{
    parse_tagged_corpus, to_inline, to_token_per_line, CorpusFormat, Polarity, PolarityLexicon, TaggedCorpus,
    TaggedDocument, TaggedToken,
};
use sentaxis::embedding::{parse_embeddings, train_sgns, write_embeddings, EmbeddingTable, SgnsConfig};
use sentaxis::eval::{classify_review, sweep_cutoffs, Classification, EvalReport, SweepInputs, SweepMode};
use sentaxis::pattern::{builtin_rules, extract_phrases, match_at, select_point_words, PointWordSet};
use sentaxis::pipeline::build_axis;
use sentaxis::pmi::{build_near_index, so_phrase, CountMode, HitCounts, NearIndex, PmiSeeds, Query};

const WORDS: &[&str] = &[
    "good", "bad", "very", "movie", "plot", "really", "excellent", "poor", "the", "was", "story", "not",
];
const TAGS: &[&str] = &["JJ", "JJ", "RB", "NN", "NNS", "VB", "VBD", "DT", ".", "JJS", "RBR", "VBN"];

fn token() -> impl Strategy<Value = TaggedToken> {
    (select(WORDS), select(TAGS)).prop_map(|(w, t)| TaggedToken::new(w, t).unwrap())
}

fn label() -> impl Strategy<Value = Option<Polarity>> {
    prop_oneof![Just(None), Just(Some(Polarity::Pos)), Just(Some(Polarity::Neg))]
}

fn corpus(max_docs: usize) -> impl Strategy<Value = TaggedCorpus> {
    prop::collection::vec((prop::collection::vec(token(), 1..30), label()), 1..max_docs).prop_map(|docs| {
        let documents = docs
            .into_iter()
            .enumerate()
            .map(|(i, (tokens, label))| TaggedDocument {
                id: format!("d{i}"),
                tokens,
                label,
            })
            .collect();
        TaggedCorpus::new(documents, "prop").unwrap()
    })
}

/// Random table over `WORDS`; the offset on the first component keeps every
/// vector away from zero.
fn table(dim: usize) -> impl Strategy<Value = EmbeddingTable> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), WORDS.len()).prop_map(move |rows| {
        EmbeddingTable::from_rows(
            dim,
            WORDS.iter().zip(rows).map(|(w, mut v)| {
                v[0] += 2.5;
                (*w, v)
            }),
        )
        .unwrap()
    })
}

fn points(words: &[&str]) -> PointWordSet {
    PointWordSet {
        words: words.iter().map(|w| w.to_string()).collect(),
        cutoff: 1,
        ..PointWordSet::default()
    }
}

fn axis_of(table: &EmbeddingTable, pos: &[&str], neg: &[&str]) -> SentimentAxis {
    let lex = PolarityLexicon::from_entries(pos.iter().map(|w| (*w, 1.0)).chain(neg.iter().map(|w| (*w, -1.0))));
    let all: Vec<&str> = pos.iter().chain(neg).copied().collect();
    build_axis(&points(&all), table, Some(&lex), AxisMode::SemiSupervised, "excellent")
        .map(|b| b.axis)
        .unwrap_or_else(|e| panic!("{e}"))
}

/// Scores that are multiples of 1/8, so sums are exact in any order.
fn dyadic_lexicon(scores: &[i32]) -> OrientationLexicon {
    OrientationLexicon {
        scores: WORDS
            .iter()
            .zip(scores)
            .map(|(w, &s)| (w.to_string(), s as f64 / 8.0))
            .collect(),
        embedding_fingerprint: "x".into(),
        mode: AxisMode::Unsupervised,
        seed: "excellent".into(),
        skipped: Vec::new(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reference_swap_negates_exactly(t in table(6)) {
        let axis = axis_of(&t, &["good", "excellent", "really"], &["bad", "poor"]);
        let swapped = axis.swapped();
        for (_, v) in t.iter() {
            prop_assert_eq!(swapped.orientation_of(v).unwrap(), -axis.orientation_of(v).unwrap());
        }
    }

    #[test]
    fn global_scaling_leaves_scores_unchanged(t in table(6), c in 1e-3f64..1e3) {
        let words = ["good", "bad", "very", "excellent", "poor", "really", "not"];
        let a = build_axis(&points(&words), &t, None, AxisMode::Unsupervised, "excellent");
        let scaled = t.scaled(c);
        let b = build_axis(&points(&words), &scaled, None, AxisMode::Unsupervised, "excellent");
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(&a.axis.pos_words, &b.axis.pos_words);
                let la = score_vocabulary(&a.axis, &t).unwrap();
                let lb = score_vocabulary(&b.axis, &scaled).unwrap();
                for (w, s) in &la.scores {
                    prop_assert!((s - lb.scores[w]).abs() <= 1e-9, "{} {} {}", w, s, lb.scores[w]);
                }
            }
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            (a, b) => prop_assert!(false, "scaling changed the outcome: {:?} vs {:?}", a.is_ok(), b.is_ok()),
        }
    }

    #[test]
    fn seed_scores_non_negative(t in table(5), unsup in any::<bool>()) {
        let words = ["good", "bad", "very", "poor", "really", "not", "plot"];
        let lex = PolarityLexicon::from_entries([("good", 1.0), ("really", 0.5), ("bad", -1.0), ("poor", -1.0), ("not", -0.2)]);
        let mode = if unsup { AxisMode::Unsupervised } else { AxisMode::SemiSupervised };
        if let Ok(built) = build_axis(&points(&words), &t, Some(&lex), mode, "excellent") {
            let scores = score_vocabulary(&built.axis, &t).unwrap();
            prop_assert!(scores.get("excellent").unwrap() >= 0.0);
        }
    }

    #[test]
    fn origin_partition_follows_pc1_sign(seed in any::<u64>(), k in 3usize..9) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dm = common::random_distance_matrix(&mut rng, k);
        let proj = principal_axis(&dm).unwrap();
        if let Ok(part) = partition_by_origin(&proj) {
            for (w, &v) in proj.words.iter().zip(&proj.pc1) {
                prop_assert_eq!(part.set_a.contains(w), v >= 0.0);
                prop_assert_eq!(part.set_b.contains(w), v < 0.0);
            }
        }
    }

    #[test]
    fn lexicon_partition_is_strict(scores in prop::collection::vec(-2i32..=2, WORDS.len()), thr in -1i32..=1) {
        let lex = PolarityLexicon::from_entries(WORDS.iter().zip(&scores).map(|(w, &s)| (*w, s as f64)))
            .with_threshold(thr as f64);
        let pts = points(WORDS);
        if let Ok(part) = partition_by_lexicon(&pts, &lex) {
            for (w, &s) in WORDS.iter().zip(&scores) {
                let w = w.to_string();
                prop_assert_eq!(part.set_a.contains(&w), s > thr);
                prop_assert_eq!(part.set_b.contains(&w), s < thr);
                prop_assert_eq!(part.dropped.contains(&w), s == thr);
            }
        }
    }

    #[test]
    fn raising_cutoff_never_adds_points(c in corpus(8), cutoff in 1usize..6) {
        let phrases = extract_phrases(&c, &builtin_rules());
        let lo = select_point_words(&phrases, &c, cutoff).map(|p| p.words).unwrap_or_default();
        let hi = select_point_words(&phrases, &c, cutoff + 1).map(|p| p.words).unwrap_or_default();
        prop_assert!(hi.is_subset(&lo));
    }

    #[test]
    fn extracted_phrases_revalidate(c in corpus(8)) {
        let rules = builtin_rules();
        for p in extract_phrases(&c, &rules) {
            let doc = c.documents.iter().find(|d| d.id == p.doc_id).unwrap();
            prop_assert_eq!(match_at(&doc.tokens, p.position, &rules), Some(p.rule_index));
            prop_assert_eq!(&doc.tokens[p.position].text, &p.w1);
            prop_assert_eq!(&doc.tokens[p.position + 1].text, &p.w2);
        }
    }

    #[test]
    fn extraction_ignores_document_order(c in corpus(8)) {
        let rules = builtin_rules();
        let mut reversed = c.clone();
        reversed.documents.reverse();
        let mut a = extract_phrases(&c, &rules);
        let mut b = extract_phrases(&reversed, &rules);
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn near_is_symmetric(c in corpus(6), w in 1usize..6, i in 0usize..12, j in 0usize..12, k in 0usize..12) {
        let index = build_near_index(&c, w).unwrap();
        let a = Query::term(WORDS[i]);
        let b = Query::phrase(WORDS[j], WORDS[k]);
        prop_assert_eq!(index.near_hits(&a, &b), index.near_hits(&b, &a));
        prop_assert_eq!(index.near_count(&a, &b, CountMode::Token), index.near_count(&b, &a, CountMode::Token));
    }

    #[test]
    fn near_window_is_inclusive(w in 1usize..12, gap in 0usize..14) {
        let mut tokens = vec![TaggedToken::new("alpha", "NN").unwrap()];
        tokens.extend((0..gap).map(|_| TaggedToken::new("filler", "NN").unwrap()));
        tokens.push(TaggedToken::new("omega", "NN").unwrap());
        let c = TaggedCorpus::new(vec![TaggedDocument { id: "x".into(), tokens, label: None }], "w").unwrap();
        let index = build_near_index(&c, w).unwrap();
        let hit = !index.near_hits(&Query::term("alpha"), &Query::term("omega")).is_empty();
        prop_assert_eq!(hit, gap < w);
    }

    #[test]
    fn pmi_seed_swap_negates(c in corpus(10), j in 0usize..12, k in 0usize..12, token_mode in any::<bool>()) {
        let index = build_near_index(&c, 4).unwrap();
        let seeds = PmiSeeds {
            pos: "good".into(),
            neg: "bad".into(),
            mode: if token_mode { CountMode::Token } else { CountMode::Document },
        };
        if let (Ok(a), Ok(b)) = (so_phrase(&index, (WORDS[j], WORDS[k]), &seeds), so_phrase(&index, (WORDS[j], WORDS[k]), &seeds.swapped())) {
            prop_assert_eq!(a.so, -b.so);
        }
    }

    #[test]
    fn pmi_monotone_in_near_counts(np in 0u64..50, nn in 0u64..50, ps in 1u64..50, ns in 1u64..50) {
        let h = HitCounts { near_pos: np, near_neg: nn, pos_seed: ps, neg_seed: ns };
        let more_pos = HitCounts { near_pos: np + 1, ..h };
        let more_neg = HitCounts { near_neg: nn + 1, ..h };
        prop_assert!(more_pos.orientation() > h.orientation());
        prop_assert!(more_neg.orientation() < h.orientation());
    }

    #[test]
    fn classification_ignores_token_order(
        scores in prop::collection::vec(-16i32..16, WORDS.len()),
        tokens in prop::collection::vec(token(), 1..40),
        shuffle_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let lex = dyadic_lexicon(&scores);
        let doc = TaggedDocument { id: "r".into(), tokens, label: None };
        let mut shuffled = doc.clone();
        shuffled.tokens.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle_seed));
        prop_assert_eq!(classify_review(&doc, &lex), classify_review(&shuffled, &lex));
    }

    #[test]
    fn shifting_the_lexicon_shifts_the_mean(
        scores in prop::collection::vec(-16i32..16, WORDS.len()),
        tokens in prop::collection::vec(token(), 1..40),
        shift in -8i32..8,
    ) {
        let lex = dyadic_lexicon(&scores);
        let c = shift as f64 / 8.0;
        let doc = TaggedDocument { id: "r".into(), tokens, label: None };
        let base = classify_review(&doc, &lex);
        let moved = classify_review(&doc, &lex.shifted(c));
        prop_assert!((moved.mean - (base.mean + c)).abs() < 1e-12);
        let expected = if base.mean + c < 0.0 { Polarity::Neg } else { Polarity::Pos };
        prop_assert_eq!(moved.label, expected);
    }

    #[test]
    fn flipping_predictions_complements_accuracy(items in prop::collection::vec((any::<bool>(), any::<bool>()), 1..100)) {
        let pol = |b: bool| if b { Polarity::Pos } else { Polarity::Neg };
        let preds: Vec<Classification> = items
            .iter()
            .map(|&(_, p)| Classification { label: pol(p), mean: 0.0, undecided: false })
            .collect();
        let flipped: Vec<Classification> = preds
            .iter()
            .map(|c| Classification { label: c.label.flipped(), ..*c })
            .collect();
        let a = EvalReport::tally(items.iter().map(|&(g, _)| pol(g)).zip(&preds)).unwrap();
        let b = EvalReport::tally(items.iter().map(|&(g, _)| pol(g)).zip(&flipped)).unwrap();
        prop_assert!((a.accuracy + b.accuracy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corpus_round_trips(c in corpus(6)) {
        let tpl = parse_tagged_corpus(&to_token_per_line(&c), CorpusFormat::TokenPerLine, "prop").unwrap();
        prop_assert_eq!(&tpl.documents, &c.documents);
        let inline = parse_tagged_corpus(&to_inline(&c), CorpusFormat::InlineTags, "prop").unwrap();
        prop_assert_eq!(&inline.documents, &c.documents);
    }

    #[test]
    fn embeddings_round_trip(t in table(4)) {
        let mut buf = Vec::new();
        write_embeddings(&t, &mut buf).unwrap();
        let back = parse_embeddings(std::str::from_utf8(&buf).unwrap(), "prop").unwrap();
        prop_assert_eq!(back.words(), t.words());
        for (w, v) in t.iter() {
            prop_assert_eq!(back.get(w).unwrap(), v);
        }
    }

    #[test]
    fn axis_and_lexicon_round_trip(t in table(4)) {
        let axis = axis_of(&t, &["good", "excellent"], &["bad", "poor"]);
        let mut buf = Vec::new();
        axis.write_tsv(&mut buf).unwrap();
        prop_assert_eq!(&SentimentAxis::parse(std::str::from_utf8(&buf).unwrap(), "prop").unwrap(), &axis);

        let lex = score_vocabulary(&axis, &t).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lex.tsv");
        lex.save(&path).unwrap();
        let back = OrientationLexicon::load(&path).unwrap();
        prop_assert_eq!(&back.scores, &lex.scores);
        prop_assert_eq!(&back.embedding_fingerprint, &lex.embedding_fingerprint);
        prop_assert_eq!(back.mode, lex.mode);
    }

    #[test]
    fn near_index_round_trips(c in corpus(6), w in 1usize..8) {
        let index = build_near_index(&c, w).unwrap();
        let mut buf = Vec::new();
        index.write_tsv(&mut buf).unwrap();
        let back = NearIndex::parse(std::str::from_utf8(&buf).unwrap(), "prop").unwrap();
        prop_assert_eq!(back, index);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pmi_sweep_k_never_grows(c in corpus(12)) {
        let labeled: Vec<TaggedDocument> = c
            .documents
            .iter()
            .map(|d| TaggedDocument { label: Some(d.label.unwrap_or(Polarity::Pos)), ..d.clone() })
            .collect();
        let index = build_near_index(&c, 5).unwrap();
        let phrases = extract_phrases(&c, &builtin_rules());
        let inputs = SweepInputs {
            corpus: &c,
            phrases: &phrases,
            reviews: &labeled,
            table: None,
            lexicon: None,
            index: Some(&index),
            seed_word: "excellent",
            pmi_seeds: PmiSeeds::default(),
        };
        let rows = sweep_cutoffs(&inputs, SweepMode::Pmi, 1..=6).unwrap();
        for pair in rows.windows(2) {
            prop_assert!(pair[1].k_point_words <= pair[0].k_point_words);
        }
    }
}

fn tiny_corpus() -> TaggedCorpus {
    let text = [
        "the_DT movie_NN was_VBD really_RB good_JJ ._.",
        "a_DT poor_JJ plot_NN and_CC bad_JJ acting_NN ._.",
        "excellent_JJ story_NN ,_, very_RB good_JJ cast_NN ._.",
    ];
    let mut lines = Vec::new();
    for i in 0..60 {
        lines.push(format!("d{i}\t-\t{} {}", text[i % 3], text[(i + 1) % 3]));
    }
    parse_tagged_corpus(&lines.join("\n"), CorpusFormat::InlineTags, "tiny").unwrap()
}

#[test]
fn single_threaded_training_is_deterministic() {
    let c = tiny_corpus();
    let cfg = SgnsConfig {
        dim: 8,
        epochs: 2,
        min_count: 1,
        ..SgnsConfig::default()
    };
    let a = train_sgns(&c, &cfg).unwrap();
    let b = train_sgns(&c, &cfg).unwrap();
    assert_eq!(a.fingerprint(), b.fingerprint());
    let mut bytes_a = Vec::new();
    let mut bytes_b = Vec::new();
    write_embeddings(&a, &mut bytes_a).unwrap();
    write_embeddings(&b, &mut bytes_b).unwrap();
    assert_eq!(bytes_a, bytes_b);

    let other = train_sgns(&c, &SgnsConfig { rng_seed: 2, ..cfg }).unwrap();
    assert_ne!(a.fingerprint(), other.fingerprint());
}

#[test]
fn document_hits_count_each_document_once() {
    let c = tiny_corpus();
    let index = build_near_index(&c, 10).unwrap();
    let seen: BTreeSet<String> = index.doc_hits(&Query::term("excellent"));
    assert_eq!(seen.len(), 40);
    assert_eq!(index.hits(&Query::term("excellent"), CountMode::Document), 40);
}
