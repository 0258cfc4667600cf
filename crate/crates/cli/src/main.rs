use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tweet_affect::augment::{
    merge_training, translate_dataset, DictionaryTranslator, RemoteTranslator, Translator,
};
use tweet_affect::config::{ExperimentConfig, Flavor, Variant};
use tweet_affect::corpus::{load_dataset, load_tweets, save_dataset, AffectTarget, Dataset, Tweet};
use tweet_affect::embeddings::load_embeddings;
use tweet_affect::ensemble::{load_manifest, stepwise_prune_with, OnReject, PruneOptions};
use tweet_affect::eval::{decode_for_task, spearman, task_score};
use tweet_affect::experiment::{dedup_pool, execute, load_resources, write_outputs};
use tweet_affect::features::FeatureSpec;
use tweet_affect::lexicons::{forward_select, load_lexicon, Lexicon};
use tweet_affect::models::{epsilon_grid, grid_search, PredictionSet, PredictorSpec};
use tweet_affect::semisup::{filter_silver, mine_indicator_words, self_train};
use tweet_affect::synthetic::{generate, SyntheticSpec};
use tweet_affect::{Error, Result};

/// Affect intensity pipeline for tweets.
///
/// Exit status: 0 on success, 1 when a computation fails, 2 for usage,
/// configuration or format errors, 3 for I/O errors.
#[derive(Debug, Parser)]
#[command(name = "tweet-affect", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tokenize tweets and write them back in canonical form.
    Preprocess(PreprocessArgs),
    /// Run a full experiment from a config file.
    Run(RunArgs),
    /// Grow a training set with agreement-filtered silver data.
    Selftrain(SelftrainArgs),
    /// Translate a labeled dataset into the task language.
    Augment(AugmentArgs),
    /// Prune an ensemble of stored predictions.
    Ensemble(EnsembleArgs),
    /// Pick lexicons by greedy forward selection.
    SelectLexicons(SelectArgs),
    /// Cross-validate model specs and report the best.
    SearchParams(SearchArgs),
    /// Mine words that are overrepresented in a target corpus.
    MineWords(MineArgs),
    /// Score a prediction file against gold labels.
    Score(ScoreArgs),
    /// Write a generated task and a smoke config.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    /// Dataset TSV, or raw tweets (one per line, optionally `id<TAB>text`).
    #[arg(long)]
    input: PathBuf,
    /// Where to write the canonical file.
    #[arg(long)]
    output: PathBuf,
    /// Task of a dataset TSV. Without it the input is read as raw tweets.
    #[arg(long)]
    task: Option<AffectTarget>,
    /// Skip the first line of a dataset TSV.
    #[arg(long)]
    header: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Override the output directory from the config.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

/// Data and feature flags shared by commands that train models.
#[derive(Debug, Args)]
struct DataArgs {
    /// Task id, e.g. EI-Reg-anger or V-Oc.
    #[arg(long)]
    task: Option<AffectTarget>,
    /// Labeled training data.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Word embeddings in text format.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Lexicon as NAME=PATH; repeatable.
    #[arg(long = "lexicon", value_parser = parse_named_path)]
    lexicons: Vec<(String, PathBuf)>,
    /// Skip the first line of dataset files.
    #[arg(long)]
    header: bool,
}

#[derive(Debug, Args)]
struct SelftrainArgs {
    /// Experiment config supplying task, data and models.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
    /// Unlabeled tweets to draw silver data from.
    #[arg(long)]
    pool: Option<PathBuf>,
    /// Indicator-word annotation that narrows the pool to the task emotion.
    #[arg(long)]
    annotation: Option<PathBuf>,
    /// Committee model: a model name from the config, or svm / ff.
    #[arg(long)]
    committee: Option<String>,
    /// Number of committee models.
    #[arg(long)]
    k: Option<usize>,
    /// Largest allowed spread of committee predictions.
    #[arg(long)]
    threshold: Option<f64>,
    /// Most silver instances to add.
    #[arg(long)]
    max_added: Option<usize>,
    /// Seed of the first committee model.
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the expanded training set.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Print the resolved settings and exit.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Debug, Args)]
struct AugmentArgs {
    /// Task of the datasets.
    #[arg(long)]
    task: AffectTarget,
    /// Labeled data in the source language.
    #[arg(long)]
    input: PathBuf,
    /// Word translation table (`source<TAB>target`).
    #[arg(long, conflicts_with = "endpoint")]
    dictionary: Option<PathBuf>,
    /// Base URL of a translation service; requests go to BASE/SRC-TGT.
    #[arg(long)]
    endpoint: Option<String>,
    /// Source language code.
    #[arg(long, default_value = "en")]
    source: String,
    /// Target language code.
    #[arg(long, default_value = "es")]
    target: String,
    /// Gold training data to prepend to the translations.
    #[arg(long)]
    merge_with: Option<PathBuf>,
    /// Where to write the translated (or merged) dataset.
    #[arg(long)]
    output: PathBuf,
    /// Skip the first line of dataset files.
    #[arg(long)]
    header: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RejectMode {
    Stop,
    Skip,
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    /// Manifest of member predictions (`name<TAB>dev<TAB>test<TAB>score`).
    #[arg(long)]
    manifest: PathBuf,
    /// Gold dev dataset the members are scored against.
    #[arg(long)]
    dev_gold: PathBuf,
    /// Task of the gold data.
    #[arg(long)]
    task: AffectTarget,
    /// Smallest score gain that justifies removing a member.
    #[arg(long, default_value_t = tweet_affect::ensemble::DEFAULT_MIN_GAIN)]
    min_gain: f64,
    /// What to do after a rejected removal.
    #[arg(long, value_enum, default_value = "stop")]
    on_reject: RejectMode,
    /// Directory for the averaged ensemble predictions.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Skip the first line of the gold file.
    #[arg(long)]
    header: bool,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Model spec as comma-separated key=value pairs.
    #[arg(long, default_value = "kind=svm,epsilon=0.05")]
    model: String,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 10)]
    folds: usize,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Candidate spec as comma-separated key=value pairs; repeatable.
    #[arg(long = "spec")]
    specs: Vec<String>,
    /// Add a kernel spec for every epsilon of the standard grid.
    #[arg(long)]
    epsilon_grid: bool,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 10)]
    folds: usize,
}

#[derive(Debug, Args)]
struct MineArgs {
    /// Tweets of the target class.
    #[arg(long)]
    target: PathBuf,
    /// Background tweets.
    #[arg(long)]
    background: PathBuf,
    /// Number of words to report.
    #[arg(long, default_value_t = 100)]
    top: usize,
    /// Write `word<TAB>ratio` lines here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Task of the gold data.
    #[arg(long)]
    task: AffectTarget,
    /// Gold dataset.
    #[arg(long)]
    gold: PathBuf,
    /// Prediction file (`id<TAB>value`).
    #[arg(long)]
    predictions: PathBuf,
    /// Skip the first line of the gold file.
    #[arg(long)]
    header: bool,
    /// Print the scores as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Directory to write the task into.
    #[arg(long)]
    output: PathBuf,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_named_path(s: &str) -> std::result::Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => Ok((name.to_string(), path.into())),
        _ => Err(format!("expected NAME=PATH, got {s:?}")),
    }
}

fn parse_spec(s: &str) -> Result<PredictorSpec> {
    let pairs = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Config(format!("expected key=value in spec, got {p:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    PredictorSpec::from_pairs(pairs)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn require<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| Error::Config(format!("--{flag} is required")))
}

fn preprocess(a: &PreprocessArgs) -> Result<()> {
    let out = match a.task {
        Some(task) => {
            let ds = load_dataset(&a.input, task, a.header)?;
            let canon = ds
                .instances()
                .iter()
                .map(|inst| {
                    let mut inst = inst.clone();
                    inst.tweet = Tweet::new(inst.tweet.id.clone(), inst.tweet.tokens.join(" "));
                    inst
                })
                .collect();
            let ds = Dataset::new(task, canon)?;
            let mut buf = Vec::new();
            tweet_affect::corpus::write_dataset(&ds, &mut buf).map_err(|e| Error::io(&a.output, e))?;
            String::from_utf8(buf).expect("utf-8 dataset")
        }
        None => load_tweets(&a.input)?
            .iter()
            .map(|t| format!("{}\t{}\n", t.id, t.tokens.join(" ")))
            .collect(),
    };
    write_file(&a.output, &out)
}

fn run(a: &RunArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(o) = &a.output {
        cfg.output = o.clone();
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let res = load_resources(&cfg)?;
    let outcome = execute(&cfg, &res)?;
    write_outputs(&cfg, &outcome, &cfg.output)?;
    if a.json {
        println!("{}", outcome.report.to_json());
    } else {
        print!("{}", outcome.report.to_table());
    }
    Ok(())
}

fn load_lexicons(list: &[(String, PathBuf)]) -> Result<Vec<Arc<Lexicon>>> {
    list.iter()
        .map(|(name, p)| load_lexicon(p, name).map(Arc::new))
        .collect()
}

fn selftrain(a: &SelftrainArgs) -> Result<()> {
    let mut cfg = match (&a.config, a.data.task) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Some(task)) => ExperimentConfig::for_task(task),
        (None, None) => return Err(Error::Config("either --config or --task is required".into())),
    };
    if let Some(task) = a.data.task {
        if task != cfg.task {
            return Err(Error::Config(format!("--task {task} differs from config task {}", cfg.task)));
        }
    }
    let d = &mut cfg.data;
    for (slot, flag) in [
        (&mut d.train, &a.data.train),
        (&mut d.silver, &a.pool),
        (&mut d.annotation, &a.annotation),
        (&mut cfg.embeddings, &a.data.embeddings),
    ] {
        if flag.is_some() {
            slot.clone_from(flag);
        }
    }
    d.header |= a.data.header;
    if !a.data.lexicons.is_empty() {
        cfg.lexicons = a.data.lexicons.clone();
    }
    let st = &mut cfg.selftrain;
    if let Some(c) = &a.committee {
        st.committee = c.clone();
    }
    if let Some(k) = a.k {
        st.k = k;
    }
    if let Some(t) = a.threshold {
        st.threshold = t;
    }
    if let Some(m) = a.max_added {
        st.max_added = m;
    }
    let seed = a.seed.unwrap_or(cfg.seed);
    println!(
        "self-training {}: committee {}, k {}, threshold {}, max added {}",
        cfg.task, st.committee, st.k, st.threshold, st.max_added
    );
    let committee = cfg
        .models
        .get(&st.committee)
        .ok_or_else(|| Error::Config(format!("unknown committee model {:?}", st.committee)))?
        .clone();
    let st_cfg = st.to_config(seed);
    st_cfg.validate()?;
    if a.dry_run {
        return Ok(());
    }
    let output = require(&a.output, "output")?.clone();
    require(&cfg.data.silver, "pool")?;
    cfg.variants = vec![Variant {
        name: format!("{}-s", st.committee),
        model: st.committee.clone(),
        flavor: Flavor::Silver,
    }];
    // only the training split matters here
    cfg.data.dev = cfg.data.train.clone();
    cfg.data.test = None;
    cfg.validate()?;
    let res = load_resources(&cfg)?;
    let features = FeatureSpec::new(res.embeddings.clone(), res.lexicons.clone());
    let pool = dedup_pool(res.silver_pool.as_deref().unwrap_or_default(), cfg.selftrain.min_tokens);
    let candidates = filter_silver(&pool, &committee, &features, &res.train, &st_cfg)?;
    let grown = self_train(&res.train, &candidates)?;
    save_dataset(&grown, &output)?;
    println!(
        "added {} of {} pool tweets; {} instances written to {}",
        candidates.len(),
        pool.len(),
        grown.len(),
        output.display()
    );
    Ok(())
}

fn augment(a: &AugmentArgs) -> Result<()> {
    let input = load_dataset(&a.input, a.task, a.header)?;
    let translator: Box<dyn Translator> = match (&a.dictionary, &a.endpoint) {
        (Some(p), _) => Box::new(DictionaryTranslator::load(p)?),
        (None, Some(url)) => Box::new(RemoteTranslator::new(url.clone())),
        (None, None) => return Err(Error::Config("either --dictionary or --endpoint is required".into())),
    };
    let out = translate_dataset(&input, translator.as_ref(), &a.source, &a.target)?;
    for id in &out.skipped {
        eprintln!("skipped {id}");
    }
    let result = match &a.merge_with {
        Some(p) => merge_training(&load_dataset(p, a.task, a.header)?, &out.value)?,
        None => out.value,
    };
    save_dataset(&result, &a.output)?;
    println!(
        "translated {} of {} instances; {} written to {}",
        input.len() - out.skipped.len(),
        input.len(),
        result.len(),
        a.output.display()
    );
    Ok(())
}

fn ensemble(a: &EnsembleArgs) -> Result<()> {
    let members = load_manifest(&a.manifest)?;
    let gold = load_dataset(&a.dev_gold, a.task, a.header)?;
    let by_id: HashMap<&str, f64> = gold
        .instances()
        .iter()
        .map(|i| (i.tweet.id.as_str(), i.label))
        .collect();
    let first = members
        .first()
        .ok_or_else(|| Error::InvalidInput("manifest lists no members".into()))?;
    let dev_gold = first
        .dev
        .ids
        .iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("prediction id {id:?} has no gold label")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let opts = PruneOptions {
        min_gain: a.min_gain,
        on_reject: match a.on_reject {
            RejectMode::Stop => OnReject::Stop,
            RejectMode::Skip => OnReject::Skip,
        },
    };
    let result = stepwise_prune_with(&members, |p| task_score(a.task, &p.values, &dev_gold), &opts)?;
    if let Some(dir) = &a.output {
        write_file(&dir.join("ensemble.dev.tsv"), &result.averaged_dev.to_tsv())?;
        if !result.averaged_test.is_empty() {
            write_file(&dir.join("ensemble.test.tsv"), &result.averaged_test.to_tsv())?;
        }
    }
    if a.json {
        let json = serde_json::to_string_pretty(&result)
            .map_err(|e| Error::Computation(format!("serializing ensemble: {e}")))?;
        println!("{json}");
        return Ok(());
    }
    println!("all members: dev {:.6}", result.full_score);
    for r in &result.removal_log {
        println!(
            "remove {}: dev {:.6} ({})",
            r.name,
            r.score,
            if r.accepted { "accepted" } else { "rejected" }
        );
    }
    println!("kept: {}", result.kept.join(", "));
    println!("ensemble: dev {:.6}", result.dev_score);
    Ok(())
}

/// Training data and features from the shared data flags.
fn training_inputs(d: &DataArgs) -> Result<(Dataset, Option<Arc<tweet_affect::embeddings::EmbeddingTable>>, Vec<Arc<Lexicon>>)> {
    let task = *require(&d.task, "task")?;
    let train = load_dataset(require(&d.train, "train")?, task, d.header)?;
    let vocab = train.tweets().flat_map(|t| t.tokens.iter().cloned()).collect();
    let embeddings = d
        .embeddings
        .as_deref()
        .map(|p| load_embeddings(p, Some(&vocab)).map(Arc::new))
        .transpose()?;
    Ok((train, embeddings, load_lexicons(&d.lexicons)?))
}

fn select_lexicons(a: &SelectArgs) -> Result<()> {
    let trainer = parse_spec(&a.model)?;
    let (train, embeddings, lexicons) = training_inputs(&a.data)?;
    if lexicons.is_empty() {
        return Err(Error::Config("at least one --lexicon is required".into()));
    }
    let base = FeatureSpec::new(embeddings, Vec::new());
    let (chosen, sel) = forward_select(&lexicons, &base, &trainer, &train, a.folds)?;
    println!("base score {:.6}", sel.base_score);
    for (lex, gain) in lexicons.iter().zip(&sel.gains) {
        println!("{}\tgain {:.6}", lex.name(), gain);
    }
    let names: Vec<&str> = chosen.iter().map(|l| l.name()).collect();
    println!("selected: {}", names.join(", "));
    Ok(())
}

fn search_params(a: &SearchArgs) -> Result<()> {
    let mut specs = a.specs.iter().map(|s| parse_spec(s)).collect::<Result<Vec<_>>>()?;
    if a.epsilon_grid {
        specs.extend(epsilon_grid().into_iter().map(PredictorSpec::kernel_svr));
    }
    match specs.len() {
        0 => return Err(Error::Config("give at least one --spec or --epsilon-grid".into())),
        1 => {
            print!("{}", specs[0].to_config("model"));
            return Ok(());
        }
        _ => {}
    }
    let (train, embeddings, lexicons) = training_inputs(&a.data)?;
    let features = FeatureSpec::new(embeddings, lexicons);
    if features.width() == 0 {
        return Err(Error::Config("no features: give --embeddings or --lexicon".into()));
    }
    let x = features.featurize_all(train.tweets());
    let (best, table) = grid_search(&specs, &x, &train.labels(), a.folds)?;
    for (spec, score) in &table {
        println!("{:.6}\t{}", score, spec.label());
    }
    println!("best:");
    print!("{}", best.to_config("model"));
    Ok(())
}

fn mine_words(a: &MineArgs) -> Result<()> {
    let target = load_tweets(&a.target)?;
    let background = load_tweets(&a.background)?;
    let words = mine_indicator_words(&target, &background, a.top)?;
    let text: String = words.iter().map(|(w, r)| format!("{w}\t{r}\n")).collect();
    match &a.output {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn score(a: &ScoreArgs) -> Result<()> {
    let gold = load_dataset(&a.gold, a.task, a.header)?;
    let pred = PredictionSet::load(&a.predictions)?;
    let by_id: HashMap<&str, f64> = pred.ids.iter().map(String::as_str).zip(pred.values.iter().copied()).collect();
    let values = gold
        .ids()
        .iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("no prediction for {id:?}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let labels = gold.labels();
    let p = task_score(a.task, &values, &labels)?;
    let s = spearman(&decode_for_task(a.task, &values), &labels)?;
    if a.json {
        println!(
            "{}",
            serde_json::json!({"task": a.task.task_id(), "n": labels.len(), "pearson": p, "spearman": s})
        );
    } else {
        println!("{}\tn {}\tpearson {:.6}\tspearman {:.6}", a.task, labels.len(), p, s);
    }
    Ok(())
}

fn synth(a: &SynthArgs) -> Result<()> {
    let task = generate(&SyntheticSpec {
        seed: a.seed,
        ..SyntheticSpec::default()
    })?;
    let cfg = task.write_to(&a.output)?;
    println!("wrote {}", cfg.display());
    Ok(())
}

fn dispatch(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Preprocess(a) => preprocess(a),
        Command::Run(a) => run(a),
        Command::Selftrain(a) => selftrain(a),
        Command::Augment(a) => augment(a),
        Command::Ensemble(a) => ensemble(a),
        Command::SelectLexicons(a) => select_lexicons(a),
        Command::SearchParams(a) => search_params(a),
        Command::MineWords(a) => mine_words(a),
        Command::Score(a) => score(a),
        Command::Synth(a) => synth(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
