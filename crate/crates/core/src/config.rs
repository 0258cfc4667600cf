//! Flat `section.key = value` configuration files and the shipped per-task
//! defaults.
//!
//! Grammar: one `key = value` pair per line, split at the first `=`, both
//! sides trimmed. Keys are dot-separated words of letters, digits, `_` and
//! `-`. Lines that are blank or start with `#` are ignored. A key may appear
//! only once. Lists are comma-separated.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::corpus::{AffectTarget, Dimension, TaskKind};
use crate::ensemble::{OnReject, PruneOptions};
use crate::error::{Error, Result};
use crate::models::{join_usize, parse_usize_list, PredictorKind, PredictorSpec};
use crate::semisup::SelfTrainConfig;

const SHIPPED: &str = include_str!("../defaults/tasks.conf");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    /// 1-based source line.
    pub line: usize,
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key.split('.').all(|part| {
            !part.is_empty() && part.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-')
        })
}

/// Parses the flat grammar into entries in file order.
pub fn parse_flat(text: &str, path: &Path) -> Result<Vec<Entry>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::parse(path, i + 1, "expected key = value"));
        };
        let (k, v) = (k.trim(), v.trim());
        if !valid_key(k) {
            return Err(Error::parse(path, i + 1, format!("invalid key {k:?}")));
        }
        if !seen.insert(k.to_string()) {
            return Err(Error::parse(path, i + 1, format!("duplicate key {k:?}")));
        }
        out.push(Entry {
            key: k.to_string(),
            value: v.to_string(),
            line: i + 1,
        });
    }
    Ok(out)
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LstmSettings {
    pub layers: usize,
    pub nodes: usize,
    pub dropout: f64,
    /// Whether a dense layer with half as many nodes follows the recurrent
    /// layers.
    pub dense: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDefaults {
    pub target: AffectTarget,
    pub svm_epsilon: f64,
    pub ff_layers: Vec<usize>,
    pub ff_first_dropout: f64,
    pub lstm: LstmSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementSettings {
    pub threshold: f64,
    pub added: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilverDefaults {
    pub target: AffectTarget,
    /// Annotated indicator words of the emotion.
    pub words: usize,
    /// Tweets in the emotion's silver pool.
    pub tweets: usize,
    pub ff: AgreementSettings,
    pub lstm: AgreementSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShippedDefaults {
    pub tasks: Vec<TaskDefaults>,
    pub silver: Vec<SilverDefaults>,
}

impl ShippedDefaults {
    /// The defaults compiled into the library.
    pub fn get() -> &'static ShippedDefaults {
        static CELL: OnceLock<ShippedDefaults> = OnceLock::new();
        CELL.get_or_init(|| {
            ShippedDefaults::parse(SHIPPED, Path::new("defaults/tasks.conf")).expect("shipped defaults parse")
        })
    }

    pub fn source() -> &'static str {
        SHIPPED
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let entries = parse_flat(text, path)?;
        let map: BTreeMap<&str, &Entry> = entries.iter().map(|e| (e.key.as_str(), e)).collect();
        let get = |k: &str| -> Result<&Entry> {
            map.get(k)
                .copied()
                .ok_or_else(|| Error::Config(format!("{}: missing key {k}", path.display())))
        };
        let num = |k: &str| -> Result<f64> {
            let e = get(k)?;
            e.value
                .parse()
                .map_err(|_| Error::parse(path, e.line, format!("bad number {:?}", e.value)))
        };
        let int = |k: &str| -> Result<usize> {
            let e = get(k)?;
            e.value
                .parse()
                .map_err(|_| Error::parse(path, e.line, format!("bad integer {:?}", e.value)))
        };
        let flag = |k: &str| -> Result<bool> {
            let e = get(k)?;
            e.value
                .parse()
                .map_err(|_| Error::parse(path, e.line, format!("bad flag {:?}", e.value)))
        };

        let mut tasks = Vec::new();
        for target in AffectTarget::all() {
            let p = format!("task.{}", target.task_id());
            let layers_entry = get(&format!("{p}.ff.layers"))?;
            let ff_layers = parse_usize_list(&layers_entry.value)
                .ok_or_else(|| Error::parse(path, layers_entry.line, "bad layer list"))?;
            tasks.push(TaskDefaults {
                target,
                svm_epsilon: num(&format!("{p}.svm.epsilon"))?,
                ff_layers,
                ff_first_dropout: num(&format!("{p}.ff.first_dropout"))?,
                lstm: LstmSettings {
                    layers: int(&format!("{p}.lstm.layers"))?,
                    nodes: int(&format!("{p}.lstm.nodes"))?,
                    dropout: num(&format!("{p}.lstm.dropout"))?,
                    dense: flag(&format!("{p}.lstm.dense"))?,
                },
            });
        }
        let mut silver = Vec::new();
        for target in AffectTarget::all().into_iter().filter(|t| t.dimension.is_emotion()) {
            let e = target.dimension.as_str();
            let p = format!("silver.{}", target.task_id());
            silver.push(SilverDefaults {
                target,
                words: int(&format!("silver.{e}.words"))?,
                tweets: int(&format!("silver.{e}.tweets"))?,
                ff: AgreementSettings {
                    threshold: num(&format!("{p}.ff.threshold"))?,
                    added: int(&format!("{p}.ff.added"))?,
                },
                lstm: AgreementSettings {
                    threshold: num(&format!("{p}.lstm.threshold"))?,
                    added: int(&format!("{p}.lstm.added"))?,
                },
            });
        }
        Ok(ShippedDefaults { tasks, silver })
    }

    pub fn task(&self, target: AffectTarget) -> &TaskDefaults {
        self.tasks
            .iter()
            .find(|t| t.target == target)
            .expect("every task has defaults")
    }

    /// Self-training settings; valence tasks have none.
    pub fn silver(&self, target: AffectTarget) -> Option<&SilverDefaults> {
        self.silver.iter().find(|s| s.target == target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Regular,
    Translated,
    Silver,
}

impl Flavor {
    pub fn suffix(self) -> &'static str {
        match self {
            Flavor::Regular => "",
            Flavor::Translated => "-t",
            Flavor::Silver => "-s",
        }
    }
}

/// A model trained on one flavor of training data. Its name is the model
/// name plus `-t` (translated) or `-s` (silver).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub name: String,
    pub model: String,
    pub flavor: Flavor,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DataPaths {
    pub train: Option<PathBuf>,
    pub dev: Option<PathBuf>,
    pub test: Option<PathBuf>,
    /// Labeled data in the source language, translated for `-t` variants.
    pub parallel: Option<PathBuf>,
    /// Already translated labeled data, used instead of `parallel`.
    pub translated: Option<PathBuf>,
    /// Unlabeled pool for `-s` variants.
    pub silver: Option<PathBuf>,
    /// Indicator-word annotation that narrows the pool to the task emotion.
    pub annotation: Option<PathBuf>,
    /// Whether dataset files start with a header row.
    pub header: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslateSettings {
    pub dictionary: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub source: String,
    pub target: String,
}

impl Default for TranslateSettings {
    fn default() -> Self {
        TranslateSettings {
            dictionary: None,
            endpoint: None,
            source: "en".into(),
            target: "es".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTrainSettings {
    /// Model whose seeds form the agreement committee.
    pub committee: String,
    pub k: usize,
    pub threshold: f64,
    pub max_added: usize,
    /// Pool tweets with fewer tokens are ignored.
    pub min_tokens: usize,
}

impl SelfTrainSettings {
    pub fn to_config(&self, seed: u64) -> SelfTrainConfig {
        SelfTrainConfig {
            k: self.k,
            threshold: self.threshold,
            max_added: self.max_added,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: AffectTarget,
    pub seed: u64,
    /// Training runs averaged per variant.
    pub runs: usize,
    pub output: PathBuf,
    pub data: DataPaths,
    pub translate: TranslateSettings,
    pub embeddings: Option<PathBuf>,
    /// Lexicon names and files, in feature order.
    pub lexicons: Vec<(String, PathBuf)>,
    /// Run forward selection over the lexicons before training.
    pub select_lexicons: bool,
    pub folds: usize,
    pub models: BTreeMap<String, PredictorSpec>,
    pub variants: Vec<Variant>,
    pub selftrain: SelfTrainSettings,
    pub ensemble: PruneOptions,
}

impl ExperimentConfig {
    /// Shipped settings for `task`: a kernel model `svm` and a network `ff`
    /// with the task's parameters, and both as variants.
    pub fn for_task(task: AffectTarget) -> Self {
        let defaults = ShippedDefaults::get();
        let td = defaults.task(task);
        let mut ff = PredictorSpec::feed_forward(td.ff_layers.clone());
        ff.first_dropout = td.ff_first_dropout;
        let mut models = BTreeMap::new();
        models.insert("svm".to_string(), PredictorSpec::kernel_svr(td.svm_epsilon));
        models.insert("ff".to_string(), ff);
        let agreement = defaults.silver(task).map(|s| s.ff).unwrap_or(AgreementSettings {
            threshold: 0.1,
            added: 0,
        });
        ExperimentConfig {
            task,
            seed: 0,
            runs: 10,
            output: PathBuf::from("out"),
            data: DataPaths::default(),
            translate: TranslateSettings::default(),
            embeddings: None,
            lexicons: Vec::new(),
            select_lexicons: false,
            folds: 10,
            models,
            variants: ["svm", "ff"]
                .iter()
                .map(|m| Variant {
                    name: m.to_string(),
                    model: m.to_string(),
                    flavor: Flavor::Regular,
                })
                .collect(),
            selftrain: SelfTrainSettings {
                committee: "ff".into(),
                k: 10,
                threshold: agreement.threshold,
                max_added: agreement.added,
                min_tokens: 1,
            },
            ensemble: PruneOptions::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text, path)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    /// Parses a config. `experiment.task` is required; everything else
    /// overrides the task's shipped defaults. Paths are kept as written.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let entries = parse_flat(text, path)?;
        let task_entry = entries
            .iter()
            .find(|e| e.key == "experiment.task")
            .ok_or_else(|| Error::Config(format!("{}: missing experiment.task", path.display())))?;
        let task: AffectTarget = task_entry
            .value
            .parse()
            .map_err(|e: Error| Error::parse(path, task_entry.line, e.to_string()))?;
        let mut cfg = ExperimentConfig::for_task(task);
        let mut model_pairs: BTreeMap<String, Vec<(&str, &str)>> = BTreeMap::new();
        let mut variants: Option<&Entry> = None;

        for e in &entries {
            let at = |msg: String| Error::parse(path, e.line, msg);
            let bad = || at(format!("bad value {:?} for {}", e.value, e.key));
            let v = e.value.as_str();
            let opt_path = || (!v.is_empty()).then(|| PathBuf::from(v));
            let int = || v.parse::<usize>().map_err(|_| bad());
            let num = || v.parse::<f64>().map_err(|_| bad());
            let flag = || v.parse::<bool>().map_err(|_| bad());
            match e.key.as_str() {
                "experiment.task" => {}
                "experiment.seed" => cfg.seed = v.parse().map_err(|_| bad())?,
                "experiment.runs" => cfg.runs = int()?,
                "experiment.output" => cfg.output = PathBuf::from(v),
                "experiment.variants" => variants = Some(e),
                "data.train" => cfg.data.train = opt_path(),
                "data.dev" => cfg.data.dev = opt_path(),
                "data.test" => cfg.data.test = opt_path(),
                "data.parallel" => cfg.data.parallel = opt_path(),
                "data.translated" => cfg.data.translated = opt_path(),
                "data.silver" => cfg.data.silver = opt_path(),
                "data.annotation" => cfg.data.annotation = opt_path(),
                "data.header" => cfg.data.header = flag()?,
                "translate.dictionary" => cfg.translate.dictionary = opt_path(),
                "translate.endpoint" => cfg.translate.endpoint = (!v.is_empty()).then(|| v.to_string()),
                "translate.source" => cfg.translate.source = v.to_string(),
                "translate.target" => cfg.translate.target = v.to_string(),
                "features.embeddings" => cfg.embeddings = opt_path(),
                "features.select" => cfg.select_lexicons = flag()?,
                "features.folds" => cfg.folds = int()?,
                "selftrain.committee" => cfg.selftrain.committee = v.to_string(),
                "selftrain.k" => cfg.selftrain.k = int()?,
                "selftrain.threshold" => cfg.selftrain.threshold = num()?,
                "selftrain.max_added" => cfg.selftrain.max_added = int()?,
                "selftrain.min_tokens" => cfg.selftrain.min_tokens = int()?,
                "ensemble.min_gain" => cfg.ensemble.min_gain = num()?,
                "ensemble.on_reject" => {
                    cfg.ensemble.on_reject = match v {
                        "stop" => OnReject::Stop,
                        "skip" => OnReject::Skip,
                        _ => return Err(bad()),
                    }
                }
                k => {
                    if let Some(name) = k.strip_prefix("lexicon.") {
                        if name.contains('.') {
                            return Err(at(format!("invalid lexicon name {name:?}")));
                        }
                        cfg.lexicons.push((name.to_string(), PathBuf::from(v)));
                    } else if let Some(rest) = k.strip_prefix("model.") {
                        let (name, key) = rest
                            .split_once('.')
                            .ok_or_else(|| at(format!("expected model.<name>.<key>, got {k:?}")))?;
                        model_pairs.entry(name.to_string()).or_default().push((key, v));
                    } else {
                        return Err(at(format!("unknown key {k:?}")));
                    }
                }
            }
        }

        for (name, pairs) in model_pairs {
            let line = entries
                .iter()
                .find(|e| e.key.starts_with(&format!("model.{name}.")))
                .map_or(0, |e| e.line);
            let spec = cfg.models.entry(name.clone()).or_default();
            spec.apply_pairs(pairs.iter().copied())
                .map_err(|e| Error::parse(path, line, format!("model {name}: {e}")))?;
        }
        if let Some(e) = variants {
            cfg.variants = split_list(&e.value)
                .iter()
                .map(|n| cfg.resolve_variant(n))
                .collect::<Result<_>>()
                .map_err(|err| Error::parse(path, e.line, err.to_string()))?;
        }
        Ok(cfg)
    }

    /// `name` is a model name, or a model name with a `-t` or `-s` suffix.
    pub fn resolve_variant(&self, name: &str) -> Result<Variant> {
        if self.models.contains_key(name) {
            return Ok(Variant {
                name: name.into(),
                model: name.into(),
                flavor: Flavor::Regular,
            });
        }
        for flavor in [Flavor::Translated, Flavor::Silver] {
            if let Some(model) = name.strip_suffix(flavor.suffix()) {
                if self.models.contains_key(model) {
                    return Ok(Variant {
                        name: name.into(),
                        model: model.into(),
                        flavor,
                    });
                }
            }
        }
        Err(Error::Config(format!("variant {name:?} names no configured model")))
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        let d = &mut self.data;
        for p in [
            &mut d.train,
            &mut d.dev,
            &mut d.test,
            &mut d.parallel,
            &mut d.translated,
            &mut d.silver,
            &mut d.annotation,
            &mut self.translate.dictionary,
            &mut self.embeddings,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        for (_, p) in &mut self.lexicons {
            fix(p);
        }
        for spec in self.models.values_mut() {
            if let Some(p) = &mut spec.predictions {
                fix(p);
            }
        }
        fix(&mut self.output);
    }

    fn needs(&self, flavor: Flavor) -> bool {
        self.variants.iter().any(|v| v.flavor == flavor)
    }

    /// Every file the experiment reads.
    pub fn resources(&self) -> Vec<PathBuf> {
        let d = &self.data;
        let mut out: Vec<PathBuf> = [&d.train, &d.dev, &d.test, &self.embeddings]
            .into_iter()
            .flatten()
            .cloned()
            .collect();
        out.extend(self.lexicons.iter().map(|(_, p)| p.clone()));
        if self.needs(Flavor::Translated) {
            match &d.translated {
                Some(p) => out.push(p.clone()),
                None => out.extend(d.parallel.iter().chain(&self.translate.dictionary).cloned()),
            }
        }
        if self.needs(Flavor::Silver) {
            out.extend(d.silver.iter().chain(&d.annotation).cloned());
        }
        for v in &self.variants {
            if let Some(p) = self.models.get(&v.model).and_then(|m| m.predictions.as_ref()) {
                out.push(p.clone());
            }
        }
        let mut seen = HashSet::new();
        out.retain(|p| seen.insert(p.clone()));
        out
    }

    /// Checks consistency, then that every referenced file exists. All
    /// missing files are reported together.
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(Error::Config(m));
        if self.data.train.is_none() || self.data.dev.is_none() {
            return cfg_err("data.train and data.dev are required".into());
        }
        if self.runs == 0 {
            return cfg_err("experiment.runs must be at least 1".into());
        }
        if self.variants.is_empty() {
            return cfg_err("no variants configured".into());
        }
        let mut names = HashSet::new();
        for v in &self.variants {
            if !names.insert(&v.name) {
                return cfg_err(format!("duplicate variant {:?}", v.name));
            }
            let Some(spec) = self.models.get(&v.model) else {
                return cfg_err(format!("variant {:?} names unknown model {:?}", v.name, v.model));
            };
            spec.validate().map_err(|e| Error::Config(e.to_string()))?;
            if spec.kind == PredictorKind::External && v.flavor != Flavor::Regular {
                return cfg_err(format!(
                    "variant {:?}: external predictions cannot be retrained on other data",
                    v.name
                ));
            }
        }
        let mut lex = HashSet::new();
        for (n, _) in &self.lexicons {
            if !lex.insert(n) {
                return cfg_err(format!("duplicate lexicon {n:?}"));
            }
        }
        if self.embeddings.is_none() && self.lexicons.is_empty() {
            return cfg_err("no features: set features.embeddings or at least one lexicon".into());
        }
        if self.select_lexicons && self.folds < 2 {
            return cfg_err("features.folds must be at least 2".into());
        }
        if self.needs(Flavor::Translated)
            && self.data.translated.is_none()
            && (self.data.parallel.is_none()
                || (self.translate.dictionary.is_none() && self.translate.endpoint.is_none()))
        {
            return cfg_err(
                "translated variants need data.translated, or data.parallel with a dictionary or endpoint"
                    .into(),
            );
        }
        if self.needs(Flavor::Silver) {
            if !self.task.dimension.is_emotion() {
                return cfg_err("valence tasks have no silver data".into());
            }
            if self.data.silver.is_none() {
                return cfg_err("silver variants need data.silver".into());
            }
            match self.models.get(&self.selftrain.committee) {
                Some(s) if s.kind != PredictorKind::External => {}
                _ => {
                    return cfg_err(format!(
                        "selftrain.committee {:?} must name a trainable model",
                        self.selftrain.committee
                    ))
                }
            }
            self.selftrain.to_config(self.seed).validate()?;
        }
        if !(self.ensemble.min_gain >= 0.0) {
            return cfg_err("ensemble.min_gain must be non-negative".into());
        }
        let missing: Vec<PathBuf> = self.resources().into_iter().filter(|p| !p.exists()).collect();
        if !missing.is_empty() {
            return Err(Error::MissingResources(missing));
        }
        Ok(())
    }

    /// Serializes every setting; [`ExperimentConfig::parse`] reads it back
    /// unchanged.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: &str| {
            let _ = writeln!(out, "{k} = {v}");
        };
        let p = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        kv("experiment.task", &self.task.task_id());
        kv("experiment.seed", &self.seed.to_string());
        kv("experiment.runs", &self.runs.to_string());
        kv("experiment.output", &self.output.display().to_string());
        let names: Vec<&str> = self.variants.iter().map(|v| v.name.as_str()).collect();
        kv("experiment.variants", &names.join(", "));
        let d = &self.data;
        kv("data.train", &p(&d.train));
        kv("data.dev", &p(&d.dev));
        kv("data.test", &p(&d.test));
        kv("data.parallel", &p(&d.parallel));
        kv("data.translated", &p(&d.translated));
        kv("data.silver", &p(&d.silver));
        kv("data.annotation", &p(&d.annotation));
        kv("data.header", &d.header.to_string());
        kv("translate.dictionary", &p(&self.translate.dictionary));
        kv("translate.endpoint", self.translate.endpoint.as_deref().unwrap_or(""));
        kv("translate.source", &self.translate.source);
        kv("translate.target", &self.translate.target);
        kv("features.embeddings", &p(&self.embeddings));
        kv("features.select", &self.select_lexicons.to_string());
        kv("features.folds", &self.folds.to_string());
        for (n, path) in &self.lexicons {
            kv(&format!("lexicon.{n}"), &path.display().to_string());
        }
        let s = &self.selftrain;
        kv("selftrain.committee", &s.committee);
        kv("selftrain.k", &s.k.to_string());
        kv("selftrain.threshold", &s.threshold.to_string());
        kv("selftrain.max_added", &s.max_added.to_string());
        kv("selftrain.min_tokens", &s.min_tokens.to_string());
        kv("ensemble.min_gain", &self.ensemble.min_gain.to_string());
        kv(
            "ensemble.on_reject",
            match self.ensemble.on_reject {
                OnReject::Stop => "stop",
                OnReject::Skip => "skip",
            },
        );
        for (name, spec) in &self.models {
            out.push_str(&spec.to_config(&format!("model.{name}")));
        }
        out
    }
}

/// Shipped feed-forward layer sizes as written in the defaults file.
pub fn layers_label(layers: &[usize]) -> String {
    format!("({})", join_usize(layers).replace(',', ", "))
}

/// `EI-Reg` / `EI-Oc` / `V-Reg` / `V-Oc` part of a task id.
pub fn task_family(target: AffectTarget) -> &'static str {
    match (target.dimension == Dimension::Valence, target.task) {
        (false, TaskKind::Regression) => "EI-Reg",
        (false, TaskKind::Ordinal) => "EI-Oc",
        (true, TaskKind::Regression) => "V-Reg",
        (true, TaskKind::Ordinal) => "V-Oc",
    }
}
