use std::fs;
use std::path::{Path, PathBuf};

use hullmert::cli_io::{
    self, cmd_linesearch, cmd_optimize, cmd_sweep, cmd_validate, CorpusFile, ErrorKind, FeatureIndex, ForestDoc,
    RunConfig,
};
use hullmert::Metric;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn toy_config() -> RunConfig {
    RunConfig::read(&fixture("toy.config.json")).unwrap()
}

fn write_corpus(dir: &Path, name: &str, lines: &[&str]) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, lines.join("\n")).unwrap();
    p
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("hullmert-cli-io-{tag}-{}", std::process::id()));
    fs::create_dir_all(&d).unwrap();
    d
}

const CHOICE: &str = r#"{"features":["a","b"],"nodes":["s"],"goal":0,"edges":[{"head":0,"features":{"a":1,"b":2},"yield":"steep"},{"head":0,"yield":"flat"}],"reference":"flat"}"#;

#[test]
fn golden_linesearch_at_any_thread_count() {
    let golden = fs::read_to_string(fixture("toy.linesearch.golden.json")).unwrap();
    let files = [fixture("toy.jsonl")];
    for threads in [None, Some(1), Some(2), Some(4), Some(8)] {
        let out = cli_io::with_threads(threads, || cmd_linesearch(&files, &toy_config()))
            .unwrap()
            .unwrap();
        assert_eq!(out.stdout, golden, "threads {threads:?}");
        assert!(out.warnings.is_empty(), "{:?}", out.warnings);
    }
}

#[test]
fn golden_optimize_trace() {
    let golden = fs::read_to_string(fixture("toy.optimize.golden.json")).unwrap();
    let out = cmd_optimize(&[fixture("toy.jsonl")], &toy_config()).unwrap();
    assert_eq!(out.stdout, golden);
    let report: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let trace: Vec<f64> = report["trace"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn fixture_round_trips() {
    let file = CorpusFile::read(&[fixture("toy.jsonl")]).unwrap();
    let index = FeatureIndex::new(file.feature_names());
    for (_, doc) in &file.docs {
        let line = doc.to_line();
        let parsed = ForestDoc::parse(&line).unwrap();
        assert_eq!(&parsed, doc);
        assert_eq!(parsed.to_line(), line);
        // through the forest and back
        let s = doc.to_sentence(&index).unwrap();
        let back = ForestDoc::from_sentence(&s, &index);
        assert_eq!(back.to_line(), ForestDoc::from_sentence(&back.to_sentence(&index).unwrap(), &index).to_line());
        assert_eq!(back.nodes, doc.nodes);
        assert_eq!(back.edges.len(), doc.edges.len());
    }
}

#[test]
fn validate_examples() {
    let dir = scratch("validate");
    let one = write_corpus(
        &dir,
        "one.jsonl",
        &[r#"{"features":["a"],"nodes":["s"],"goal":0,"edges":[{"head":0,"features":{"a":1},"yield":"x"}],"reference":"x"}"#],
    );
    let out = cmd_validate(std::slice::from_ref(&one), &RunConfig::default()).unwrap();
    assert!(out.stdout.contains("edges=1"), "{}", out.stdout);
    assert!(out.stdout.contains("derivations=1"));

    let cyclic = write_corpus(
        &dir,
        "cyclic.jsonl",
        &[r#"{"features":["a"],"nodes":["x","loop"],"goal":0,"edges":[{"head":0,"tails":[1],"yield":"$0"},{"head":1,"tails":[1],"yield":"$0"}],"reference":"x"}"#],
    );
    let err = cmd_validate(&[cyclic], &RunConfig::default()).unwrap_err();
    assert_eq!(err.kind, ErrorKind::Data);
    assert!(err.message.contains("loop"), "{err}");
    assert!(err.message.contains("sentence 0"), "{err}");

    let two = write_corpus(&dir, "two.jsonl", &[CHOICE]);
    let config = RunConfig {
        weights: [("a".to_string(), 1.0)].into(),
        ..RunConfig::default()
    };
    let out = cmd_validate(&[two], &config).unwrap();
    assert_eq!(out.warnings, vec!["weights: 1 feature(s) not set, using 0.0: b"]);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn linesearch_examples() {
    let dir = scratch("linesearch");
    let single = write_corpus(
        &dir,
        "single.jsonl",
        &[r#"{"features":["a"],"nodes":["s"],"goal":0,"edges":[{"head":0,"features":{"a":1},"yield":"x"}],"reference":"y"}"#],
    );
    let config = RunConfig {
        weights: [("a".to_string(), 0.5)].into(),
        direction: Some([("a".to_string(), 1.0)].into()),
        ..RunConfig::default()
    };
    let out = cmd_linesearch(&[single], &config).unwrap();
    let report: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report["eta"].as_f64(), Some(0.0));
    assert_eq!(report["weights"]["a"].as_f64(), Some(0.5));

    let empty = write_corpus(&dir, "empty.jsonl", &["", "  "]);
    let err = cmd_linesearch(&[empty], &config).unwrap_err();
    assert_eq!(err.kind, ErrorKind::Usage);

    let no_dir = RunConfig {
        direction: None,
        ..config.clone()
    };
    let two = write_corpus(&dir, "two.jsonl", &[CHOICE]);
    assert_eq!(cmd_linesearch(&[two], &no_dir).unwrap_err().kind, ErrorKind::Usage);

    let bad = write_corpus(&dir, "bad.jsonl", &[CHOICE, "{not json"]);
    let err = cmd_linesearch(&[bad], &config).unwrap_err();
    assert_eq!(err.kind, ErrorKind::Data);
    assert!(err.message.contains("bad.jsonl:2"), "{err}");
    fs::remove_dir_all(dir).unwrap();
}

fn sweep_rows(stdout: &str) -> Vec<(f64, f64)> {
    stdout
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once('\t').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

#[test]
fn sweep_examples() {
    let dir = scratch("sweep");
    let two = write_corpus(&dir, "two.jsonl", &[CHOICE]);
    // lines: flat 0 and η + 2, crossing at η = -2
    let config = RunConfig {
        weights: [("a".to_string(), 0.0), ("b".to_string(), 1.0)].into(),
        direction: Some([("a".to_string(), 1.0), ("b".to_string(), 0.0)].into()),
        metric: Metric::Exact,
        ..RunConfig::default()
    };
    let rows = sweep_rows(&cmd_sweep(std::slice::from_ref(&two), &config, (-4.0, 0.0), 41).unwrap().stdout);
    assert_eq!(rows.len(), 41);
    let jumps: Vec<_> = rows.windows(2).filter(|w| w[0].1 != w[1].1).collect();
    assert_eq!(jumps.len(), 1);
    assert!(jumps[0][0].0 <= -2.0 && jumps[0][1].0 > -2.0);

    let flat = RunConfig {
        direction: Some([("a".to_string(), 0.0), ("b".to_string(), 0.0)].into()),
        ..config.clone()
    };
    let rows = sweep_rows(&cmd_sweep(std::slice::from_ref(&two), &flat, (-4.0, 4.0), 9).unwrap().stdout);
    assert!(rows.iter().all(|r| r.1 == rows[0].1));

    let rows = sweep_rows(&cmd_sweep(std::slice::from_ref(&two), &config, (-3.0, 5.0), 1).unwrap().stdout);
    assert_eq!(rows, vec![(-3.0, 0.0)]);

    assert_eq!(cmd_sweep(std::slice::from_ref(&two), &config, (1.0, -1.0), 5).unwrap_err().kind, ErrorKind::Usage);
    assert_eq!(cmd_sweep(&[two], &config, (0.0, 1.0), 0).unwrap_err().kind, ErrorKind::Usage);
    assert!(cli_io::parse_range("-1:2").is_ok());
    assert!(cli_io::parse_range("2:-1").is_err());
    assert!(cli_io::parse_range("a:b").is_err());
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn optimize_examples() {
    let config = RunConfig {
        iterations: 0,
        ..toy_config()
    };
    let out = cmd_optimize(&[fixture("toy.jsonl")], &config).unwrap();
    let report: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report["weights"], report["initial_weights"]);
    assert!(report["trace"].as_array().unwrap().is_empty());

    let dir = scratch("optimize");
    let same = write_corpus(
        &dir,
        "same.jsonl",
        &[r#"{"features":["a"],"nodes":["s"],"goal":0,"edges":[{"head":0,"features":{"a":1},"yield":"x y"},{"head":0,"features":{"a":1},"yield":"x y"}],"reference":"x z"}"#],
    );
    let config = RunConfig {
        weights: [("a".to_string(), 1.0)].into(),
        metric: Metric::Exact,
        ..RunConfig::default()
    };
    let out = cmd_optimize(&[same], &config).unwrap();
    let report: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report["sweeps"].as_u64(), Some(1));
    assert_eq!(report["trace"], serde_json::json!([1.0, 1.0]));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn reports_use_fixed_float_format() {
    let golden = fs::read_to_string(fixture("toy.linesearch.golden.json")).unwrap();
    assert!(golden.contains("\"offset\": 1.0000000000000001e-1"));
}
