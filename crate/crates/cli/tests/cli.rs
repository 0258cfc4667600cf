use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tweet-affect"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn synth(dir: &Path) -> PathBuf {
    let out = run(&["synth", "--output", dir.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir.join("smoke.conf")
}

#[test]
fn every_subcommand_documents_its_flags() {
    let table: &[(&str, &[&str])] = &[
        ("preprocess", &["--input", "--output", "--task", "--header"]),
        ("run", &["--config", "--output", "--seed", "--json"]),
        (
            "selftrain",
            &[
                "--config", "--task", "--train", "--embeddings", "--lexicon", "--header", "--pool",
                "--annotation", "--committee", "--k", "--threshold", "--max-added", "--seed", "--output",
                "--dry-run",
            ],
        ),
        (
            "augment",
            &[
                "--task", "--input", "--dictionary", "--endpoint", "--source", "--target", "--merge-with",
                "--output", "--header",
            ],
        ),
        (
            "ensemble",
            &["--manifest", "--dev-gold", "--task", "--min-gain", "--on-reject", "--output", "--header", "--json"],
        ),
        (
            "select-lexicons",
            &["--task", "--train", "--embeddings", "--lexicon", "--header", "--model", "--folds"],
        ),
        (
            "search-params",
            &["--task", "--train", "--embeddings", "--lexicon", "--header", "--spec", "--epsilon-grid", "--folds"],
        ),
        ("mine-words", &["--target", "--background", "--top", "--output"]),
        ("score", &["--task", "--gold", "--predictions", "--header", "--json"]),
        ("synth", &["--output", "--seed"]),
    ];
    let top = run(&["--help"]);
    assert_eq!(code(&top), 0);
    for (cmd, flags) in table {
        assert!(stdout(&top).contains(cmd), "top-level help lists {cmd}");
        let out = run(&[cmd, "--help"]);
        assert_eq!(code(&out), 0, "{cmd} --help");
        let text = stdout(&out);
        for flag in *flags {
            assert!(text.contains(flag), "{cmd} --help documents {flag}");
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["run"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["ensemble", "--task", "EI-Reg-nope", "--manifest", "m", "--dev-gold", "g"])), 2);
}

#[test]
fn preprocess_writes_canonical_rows() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.tsv");
    fs::write(
        &input,
        "1\tHola @Ana!! mira https://t.co/x #Feliz\tjoy\t0.5\n\
         2\tQue DIA tan bonito 😀😀\tjoy\t0.75\n\
         3\tnada :)\tjoy\t0.1\n",
    )
    .unwrap();
    let once = dir.path().join("once.tsv");
    let out = run(&["preprocess", "--input", input.to_str().unwrap(), "--output", once.to_str().unwrap(), "--task", "EI-Reg-joy"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let first = fs::read_to_string(&once).unwrap();
    assert_eq!(first.lines().count(), 3);
    assert!(first.starts_with("1\thola @username !! mira URL #feliz\tjoy\t0.5\n"), "{first}");

    let twice = dir.path().join("twice.tsv");
    let out = run(&["preprocess", "--input", once.to_str().unwrap(), "--output", twice.to_str().unwrap(), "--task", "EI-Reg-joy"]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(&twice).unwrap(), first);
}

#[test]
fn preprocess_reports_the_malformed_line() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.tsv");
    fs::write(&input, "1\tok\tjoy\t0.5\n2\tmissing columns\n").unwrap();
    let out = run(&[
        "preprocess",
        "--input",
        input.to_str().unwrap(),
        "--output",
        dir.path().join("o.tsv").to_str().unwrap(),
        "--task",
        "EI-Reg-joy",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("in.tsv:2:"), "{}", stderr(&out));
}

#[test]
fn smoke_run_is_fast_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let conf = synth(dir.path());
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.path().join(name);
        let start = Instant::now();
        let out = run(&["run", "--config", conf.to_str().unwrap(), "--output", out_dir.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert!(start.elapsed() < Duration::from_secs(60));
        assert!(stdout(&out).contains("ensemble"));
        outputs.push(out_dir);
    }
    let files = [
        "report.tsv",
        "manifest.tsv",
        "run.log",
        "models/ensemble.json",
        "predictions/svm.test.tsv",
        "predictions/svm-s.dev.tsv",
        "predictions/ensemble.test.tsv",
    ];
    for f in files {
        let a = fs::read(outputs[0].join(f)).unwrap();
        let b = fs::read(outputs[1].join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between runs");
    }

    // the written manifest is enough to redo the ensemble step
    let out = run(&[
        "ensemble",
        "--manifest",
        outputs[0].join("manifest.tsv").to_str().unwrap(),
        "--dev-gold",
        dir.path().join("dev.tsv").to_str().unwrap(),
        "--task",
        "EI-Reg-joy",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let log = fs::read_to_string(outputs[0].join("run.log")).unwrap();
    let kept = log.lines().find_map(|l| l.strip_prefix("ensemble keeps ")).unwrap();
    assert!(stdout(&out).contains(&format!("kept: {kept}")), "{}", stdout(&out));
}

#[test]
fn run_json_matches_report() {
    let dir = TempDir::new().unwrap();
    let conf = synth(dir.path());
    let out_dir = dir.path().join("out");
    let out = run(&["run", "--config", conf.to_str().unwrap(), "--output", out_dir.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json = tweet_affect::eval::ScoreReport::from_json(&stdout(&out)).unwrap();
    let tsv = tweet_affect::eval::ScoreReport::from_tsv(&fs::read_to_string(out_dir.join("report.tsv")).unwrap()).unwrap();
    assert_eq!(json, tsv);
}

#[test]
fn missing_lexicon_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let conf = synth(dir.path());
    fs::remove_file(dir.path().join("lexicon.tsv")).unwrap();
    let out = run(&["run", "--config", conf.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("lexicon.tsv"), "{}", stderr(&out));
    assert!(!dir.path().join("out").exists(), "nothing is trained before validation");
}

#[test]
fn missing_config_is_an_io_error() {
    let out = run(&["run", "--config", "/definitely/not/here.conf"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn unreachable_translator_is_a_computation_error() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("en.tsv");
    fs::write(&input, "1\thappy day\tjoy\t0.5\n2\tsad day\tjoy\t0.2\n").unwrap();
    let out = run(&[
        "augment",
        "--task",
        "EI-Reg-joy",
        "--input",
        input.to_str().unwrap(),
        "--endpoint",
        "http://127.0.0.1:9",
        "--output",
        dir.path().join("es.tsv").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn augment_with_dictionary_merges_gold_first() {
    let dir = TempDir::new().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    fs::write(p("en.tsv"), "e1\thappy day\tjoy\t0.8\n").unwrap();
    fs::write(p("gold.tsv"), "g1\tdia triste\tjoy\t0.1\n").unwrap();
    fs::write(p("dict.tsv"), "happy\tfeliz\nday\tdia\n").unwrap();
    let out = run(&[
        "augment", "--task", "EI-Reg-joy", "--input", &p("en.tsv"), "--dictionary", &p("dict.tsv"),
        "--merge-with", &p("gold.tsv"), "--output", &p("out.tsv"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(p("out.tsv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("g1\t"));
    assert!(rows[1].starts_with("e1\tfeliz dia\tjoy\t0.8"), "{}", rows[1]);
}

#[test]
fn ensemble_fixture_keeps_b_and_c() {
    let out = run(&[
        "ensemble",
        "--manifest",
        fixture("ensemble/manifest.tsv").to_str().unwrap(),
        "--dev-gold",
        fixture("ensemble/dev_gold.tsv").to_str().unwrap(),
        "--task",
        "EI-Reg-joy",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("kept: B, C"), "{text}");
    assert!(text.contains("remove A: dev 0.973035 (accepted)"), "{text}");
    assert!(text.contains("remove B: dev 0.885714 (rejected)"), "{text}");
}

#[test]
fn ensemble_json_is_machine_readable() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "ensemble",
        "--manifest",
        fixture("ensemble/manifest.tsv").to_str().unwrap(),
        "--dev-gold",
        fixture("ensemble/dev_gold.tsv").to_str().unwrap(),
        "--task",
        "EI-Reg-joy",
        "--json",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["kept"], serde_json::json!(["B", "C"]));
    let dev = fs::read_to_string(dir.path().join("ensemble.dev.tsv")).unwrap();
    assert_eq!(dev.lines().next(), Some("d1\t0.15000000000000002"));
}

#[test]
fn selftrain_banner_echoes_shipped_defaults() {
    let out = run(&["selftrain", "--task", "EI-Reg-anger", "--dry-run"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("EI-Reg-anger"), "{text}");
    assert!(text.contains("threshold 0.1,"), "{text}");
    assert!(text.contains("max added 2500"), "{text}");

    let out = run(&["selftrain", "--task", "EI-Reg-anger", "--threshold", "0.05", "--dry-run"]);
    assert!(stdout(&out).contains("threshold 0.05,"));
    let out = run(&["selftrain", "--task", "EI-Reg-anger", "--k", "1", "--dry-run"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn selftrain_grows_the_training_set() {
    let dir = TempDir::new().unwrap();
    let conf = synth(dir.path());
    let grown = dir.path().join("grown.tsv");
    let out = run(&[
        "selftrain",
        "--config",
        conf.to_str().unwrap(),
        "--k",
        "3",
        "--max-added",
        "40",
        "--output",
        grown.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&grown).unwrap();
    let silver = text.lines().filter(|l| l.ends_with("\tsilver")).count();
    assert_eq!(text.lines().count(), 300 + silver);
    assert!(silver > 0 && silver <= 40);
}

#[test]
fn search_params_with_one_spec_prints_it() {
    let out = run(&["search-params", "--spec", "kind=svm,epsilon=0.01,cost=2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("model.kind = kernel_svr"));
    assert!(text.contains("model.epsilon = 0.01"));
    assert!(text.contains("model.cost = 2"));

    let out = run(&["search-params", "--spec", "kind=svm,epsilon=-1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn search_params_picks_from_a_grid() {
    let dir = TempDir::new().unwrap();
    synth(dir.path());
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let out = run(&[
        "search-params", "--task", "EI-Reg-joy", "--train", &p("train.tsv"), "--embeddings", &p("embeddings.txt"),
        "--spec", "kind=svm,epsilon=0.05", "--spec", "kind=svm,epsilon=0.3", "--folds", "3",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("best:"));
}

#[test]
fn select_lexicons_and_mine_words_run_on_generated_files() {
    let dir = TempDir::new().unwrap();
    synth(dir.path());
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let out = run(&[
        "select-lexicons", "--task", "EI-Reg-joy", "--train", &p("train.tsv"),
        "--lexicon", &format!("synthetic={}", p("lexicon.tsv")), "--folds", "3",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("selected: synthetic"), "{}", stdout(&out));

    let out = run(&["mine-words", "--target", &p("pool.txt"), "--background", &p("background.txt"), "--top", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 5);
}

#[test]
fn score_matches_the_report() {
    let dir = TempDir::new().unwrap();
    let conf = synth(dir.path());
    let out_dir = dir.path().join("out");
    assert_eq!(code(&run(&["run", "--config", conf.to_str().unwrap(), "--output", out_dir.to_str().unwrap()])), 0);
    let out = run(&[
        "score",
        "--task",
        "EI-Reg-joy",
        "--gold",
        dir.path().join("test.tsv").to_str().unwrap(),
        "--predictions",
        out_dir.join("predictions/svm.test.tsv").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let report =
        tweet_affect::eval::ScoreReport::from_tsv(&fs::read_to_string(out_dir.join("report.tsv")).unwrap()).unwrap();
    let row = report.get("EI-Reg-joy", "svm").unwrap();
    assert_eq!(v["pearson"].as_f64(), row.test);
}
