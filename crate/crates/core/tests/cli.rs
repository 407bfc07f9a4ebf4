mod common;

use std::path::Path;
use std::process::Command;

fn sentaxis(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_sentaxis")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "sentaxis {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn report_value(path: &Path, key: &str) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(String::from))
        .unwrap_or_else(|| panic!("{key} missing from {}", path.display()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_fixture_reviews() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    sentaxis(&[
        "classify",
        "--lexicon",
        s(&common::fixture("eval_lexicon.tsv")),
        "--reviews",
        s(&common::fixture("eval_reviews20.tsv")),
        "--report",
        s(&report),
    ]);
    assert_eq!(report_value(&report, "accuracy"), "0.45");
    assert_eq!(report_value(&report, "n_undecided"), "3");
}

#[test]
fn pmi_baseline_on_toy_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("pmi.txt");
    let hits = dir.path().join("hits.tsv");
    sentaxis(&[
        "pmi-baseline",
        "--corpus",
        s(&common::fixture("pmi_toy.tsv")),
        "--reviews",
        s(&common::fixture("pmi_reviews10.tsv")),
        "--report",
        s(&report),
        "--hits-out",
        s(&hits),
    ]);
    assert_eq!(report_value(&report, "n_total"), "10");
    assert_eq!(report_value(&report, "config.no_phrase_reviews"), "1");
    let dump = std::fs::read_to_string(&hits).unwrap();
    assert!(dump.contains("doc_hits\texcellent\t10"), "{dump}");
}

#[test]
fn staged_commands_match_the_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let train = std::fs::read_to_string(common::data("imdb_train.tsv")).unwrap();
    let small: String = train.lines().take(400).map(|l| format!("{l}\n")).collect();
    let corpus = d.join("small.tsv");
    std::fs::write(&corpus, small).unwrap();
    let reviews = common::data("imdb_test.tsv");
    let sgns = ["--dim", "20", "--epochs", "2", "--window", "5"];

    let vec = d.join("vec.txt");
    let mut args = vec!["train-embeddings", "--corpus", s(&corpus), "--out", s(&vec)];
    args.extend(sgns);
    sentaxis(&args);
    let phrases = d.join("phrases.tsv");
    sentaxis(&["extract-phrases", "--corpus", s(&corpus), "--out", s(&phrases)]);
    let points = d.join("points.tsv");
    sentaxis(&[
        "select-points", "--phrases", s(&phrases), "--corpus", s(&corpus), "--cutoff", "3", "--out", s(&points),
    ]);
    let axis_dir = d.join("axis");
    sentaxis(&["build-axis", "--embeddings", s(&vec), "--points", s(&points), "--out", s(&axis_dir)]);
    let lexicon = d.join("lexicon.tsv");
    sentaxis(&["score", "--axis", s(&axis_dir), "--embeddings", s(&vec), "--out", s(&lexicon)]);
    let report = d.join("report.txt");
    sentaxis(&["classify", "--lexicon", s(&lexicon), "--reviews", s(&reviews), "--report", s(&report)]);

    let run_dir = d.join("run");
    let mut args = vec![
        "run", "--corpus", s(&corpus), "--reviews", s(&reviews), "--cutoff", "3", "--out", s(&run_dir),
    ];
    args.extend(sgns);
    sentaxis(&args);

    assert_eq!(
        std::fs::read(&lexicon).unwrap(),
        std::fs::read(run_dir.join("lexicon.tsv")).unwrap()
    );
    assert_eq!(
        report_value(&report, "accuracy"),
        report_value(&run_dir.join("report.txt"), "accuracy")
    );
}
