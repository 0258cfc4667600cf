//! End-to-end experiment: train every configured variant, average runs,
//! ensemble and score.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::augment::{merge_training, translate_dataset, DictionaryTranslator, RemoteTranslator, Translator};
use crate::config::{ExperimentConfig, Flavor};
use crate::corpus::{filter_corpus, load_dataset, load_tweets, Dataset, Tweet};
use crate::embeddings::{load_embeddings, EmbeddingTable};
use crate::ensemble::{
    average_members, manifest_to_tsv, stepwise_prune_with, EnsembleMember, EnsembleResult, ManifestEntry, Split,
};
use crate::error::{Error, Result};
use crate::eval::{task_score, ScoreReport, ScoreRow};
use crate::features::FeatureSpec;
use crate::lexicons::{forward_select, load_lexicon, Lexicon};
use crate::models::{self, PredictionSet, PredictorKind};
use crate::semisup::{build_silver_sets, filter_silver, self_train, EmotionWordList};

/// Offset between the variant run seeds and the agreement committee seeds.
const COMMITTEE_SEED_OFFSET: u64 = 10_000;

/// Everything an experiment reads, already parsed.
#[derive(Debug, Clone)]
pub struct Resources {
    pub train: Dataset,
    pub dev: Dataset,
    pub test: Option<Dataset>,
    pub embeddings: Option<Arc<EmbeddingTable>>,
    pub lexicons: Vec<Arc<Lexicon>>,
    /// Translated training data for `-t` variants.
    pub translated: Option<Dataset>,
    /// Unlabeled pool for `-s` variants, already narrowed to the task.
    pub silver_pool: Option<Vec<Tweet>>,
    pub log: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct VariantOutcome {
    pub name: String,
    pub training_size: usize,
    pub dev: PredictionSet,
    pub test: PredictionSet,
    pub dev_score: f64,
    pub test_score: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: ScoreReport,
    pub variants: Vec<VariantOutcome>,
    pub average_dev: PredictionSet,
    pub average_test: PredictionSet,
    pub ensemble: EnsembleResult,
    pub selected_lexicons: Vec<String>,
    pub silver_added: Option<usize>,
    pub log: Vec<String>,
}

impl ExperimentOutcome {
    pub fn variant(&self, name: &str) -> Option<&VariantOutcome> {
        self.variants.iter().find(|v| v.name == name)
    }
}

fn needs(cfg: &ExperimentConfig, flavor: Flavor) -> bool {
    cfg.variants.iter().any(|v| v.flavor == flavor)
}

/// Loads and prepares the resources of a validated config.
pub fn load_resources(cfg: &ExperimentConfig) -> Result<Resources> {
    let d = &cfg.data;
    let load = |p: &Path| load_dataset(p, cfg.task, d.header);
    let train = load(d.train.as_ref().expect("validated"))?;
    let dev = load(d.dev.as_ref().expect("validated"))?;
    let test = d.test.as_deref().map(load).transpose()?;
    let mut log = Vec::new();

    let translated = if needs(cfg, Flavor::Translated) {
        Some(match &d.translated {
            Some(p) => load(p)?,
            None => {
                let parallel = load(d.parallel.as_ref().expect("validated"))?;
                let translator: Box<dyn Translator> = match (&cfg.translate.dictionary, &cfg.translate.endpoint) {
                    (Some(dict), _) => Box::new(DictionaryTranslator::load(dict)?),
                    (None, Some(url)) => Box::new(RemoteTranslator::new(url.clone())),
                    (None, None) => unreachable!("validated"),
                };
                let out = translate_dataset(&parallel, translator.as_ref(), &cfg.translate.source, &cfg.translate.target)?;
                log.push(format!(
                    "translated {} of {} instances ({} skipped)",
                    out.value.len(),
                    parallel.len(),
                    out.skipped.len()
                ));
                out.value
            }
        })
    } else {
        None
    };

    let silver_pool = if needs(cfg, Flavor::Silver) {
        let mut pool = load_tweets(d.silver.as_ref().expect("validated"))?;
        if let Some(ann) = &d.annotation {
            let words = EmotionWordList::load(ann)?;
            let mut sets = build_silver_sets(&words, &pool);
            pool = sets.remove(&cfg.task.dimension).unwrap_or_default();
            log.push(format!(
                "silver pool narrowed to {} tweets by {} {} words",
                pool.len(),
                words.count(cfg.task.dimension),
                cfg.task.dimension
            ));
        }
        Some(pool)
    } else {
        None
    };

    let embeddings = match &cfg.embeddings {
        Some(p) => {
            let mut vocab: HashSet<String> = HashSet::new();
            let datasets = [Some(&train), Some(&dev), test.as_ref(), translated.as_ref()];
            for ds in datasets.into_iter().flatten() {
                for t in ds.tweets() {
                    vocab.extend(t.tokens.iter().cloned());
                }
            }
            for t in silver_pool.iter().flatten() {
                vocab.extend(t.tokens.iter().cloned());
            }
            Some(Arc::new(load_embeddings(p, Some(&vocab))?))
        }
        None => None,
    };
    let lexicons = cfg
        .lexicons
        .iter()
        .map(|(name, p)| load_lexicon(p, name).map(Arc::new))
        .collect::<Result<_>>()?;

    Ok(Resources {
        train,
        dev,
        test,
        embeddings,
        lexicons,
        translated,
        silver_pool,
        log,
    })
}

/// Keeps the first tweet of every id and every token sequence.
pub fn dedup_pool(pool: &[Tweet], min_tokens: usize) -> Vec<Tweet> {
    let mut ids = HashSet::new();
    let unique: Vec<Tweet> = pool.iter().filter(|t| ids.insert(t.id.clone())).cloned().collect();
    filter_corpus(&unique, min_tokens)
}

/// Runs the experiment in memory.
pub fn execute(cfg: &ExperimentConfig, res: &Resources) -> Result<ExperimentOutcome> {
    let mut log = res.log.clone();
    let target = cfg.task;
    for ds in [Some(&res.train), Some(&res.dev), res.test.as_ref(), res.translated.as_ref()]
        .into_iter()
        .flatten()
    {
        if ds.target() != target {
            return Err(Error::InvalidInput(format!(
                "dataset for {} given to a {} experiment",
                ds.target().task_id(),
                target.task_id()
            )));
        }
    }
    if res.train.is_empty() || res.dev.len() < 2 {
        return Err(Error::InvalidInput("need training data and at least two dev instances".into()));
    }

    let mut features = FeatureSpec::new(res.embeddings.clone(), res.lexicons.clone());
    let mut selected_lexicons: Vec<String> = res.lexicons.iter().map(|l| l.name().to_string()).collect();
    if cfg.select_lexicons && !res.lexicons.is_empty() {
        let trainer = cfg
            .variants
            .iter()
            .map(|v| &cfg.models[&v.model])
            .find(|s| s.kind != PredictorKind::External)
            .ok_or_else(|| Error::Config("lexicon selection needs a trainable model".into()))?;
        let base = FeatureSpec::new(res.embeddings.clone(), Vec::new());
        let (chosen, sel) = forward_select(&res.lexicons, &base, trainer, &res.train, cfg.folds)?;
        log.push(format!("lexicon selection base score {:.6}", sel.base_score));
        for (i, lex) in res.lexicons.iter().enumerate() {
            log.push(format!("lexicon {} gain {:.6}", lex.name(), sel.gains[i]));
        }
        if chosen.is_empty() && res.embeddings.is_none() {
            log.push("no lexicon improved the score; keeping all lexicons".into());
        } else {
            features = FeatureSpec::new(res.embeddings.clone(), chosen);
            selected_lexicons = features.lexicons.iter().map(|l| l.name().to_string()).collect();
        }
        log.push(format!("selected lexicons: {}", selected_lexicons.join(", ")));
    }

    let mut training: BTreeMap<&'static str, Dataset> = BTreeMap::new();
    training.insert("regular", res.train.clone());
    if needs(cfg, Flavor::Translated) {
        let extra = res
            .translated
            .as_ref()
            .ok_or_else(|| Error::Config("translated variants need translated data".into()))?;
        training.insert("translated", merge_training(&res.train, extra)?);
        log.push(format!("translated training set: {} + {}", res.train.len(), extra.len()));
    }
    let mut silver_added = None;
    if needs(cfg, Flavor::Silver) {
        let pool = res
            .silver_pool
            .as_ref()
            .ok_or_else(|| Error::Config("silver variants need a silver pool".into()))?;
        let pool = dedup_pool(pool, cfg.selftrain.min_tokens);
        let committee = &cfg.models[&cfg.selftrain.committee];
        let st = cfg.selftrain.to_config(cfg.seed.wrapping_add(COMMITTEE_SEED_OFFSET));
        let candidates = filter_silver(&pool, committee, &features, &res.train, &st)?;
        log.push(format!(
            "self-training: {} of {} pool tweets within spread {} (max {})",
            candidates.len(),
            pool.len(),
            st.threshold,
            st.max_added
        ));
        silver_added = Some(candidates.len());
        training.insert("silver", self_train(&res.train, &candidates)?);
    }

    let dev_ids = res.dev.ids();
    let test_ids = res.test.as_ref().map(Dataset::ids).unwrap_or_default();
    let x_dev = features.featurize_all(res.dev.tweets());
    let x_test = res.test.as_ref().map(|t| features.featurize_all(t.tweets())).unwrap_or_default();
    let eval_ids: Vec<String> = dev_ids.iter().chain(&test_ids).cloned().collect();
    let x_eval: Vec<_> = x_dev.iter().chain(&x_test).cloned().collect();
    let dev_gold = res.dev.labels();
    let test_gold = res.test.as_ref().map(Dataset::labels);
    let score_test = |p: &PredictionSet| -> Result<Option<f64>> {
        match &test_gold {
            Some(g) if g.len() >= 2 => Ok(Some(task_score(target, &p.values, g)?)),
            _ => Ok(None),
        }
    };

    let mut variants = Vec::new();
    for v in &cfg.variants {
        let spec = &cfg.models[&v.model];
        let (dev, test, size) = if spec.kind == PredictorKind::External {
            let model = models::train(spec, &[], &[])?;
            (model.predict(&dev_ids, &x_dev)?, model.predict(&test_ids, &x_test)?, 0)
        } else {
            let data = &training[match v.flavor {
                Flavor::Regular => "regular",
                Flavor::Translated => "translated",
                Flavor::Silver => "silver",
            }];
            let x = features.featurize_all(data.tweets());
            let all = models::average_runs(spec, &x, &data.labels(), &eval_ids, &x_eval, cfg.runs, cfg.seed)
                .map_err(|e| Error::training(format!("variant {}", v.name), e))?;
            let n = dev_ids.len();
            (
                PredictionSet::new(all.ids[..n].to_vec(), all.values[..n].to_vec())?,
                PredictionSet::new(all.ids[n..].to_vec(), all.values[n..].to_vec())?,
                data.len(),
            )
        };
        let dev_score = task_score(target, &dev.values, &dev_gold)?;
        let test_score = score_test(&test)?;
        log.push(format!(
            "variant {} ({}) trained on {} instances: dev {:.6}",
            v.name,
            spec.label(),
            size,
            dev_score
        ));
        variants.push(VariantOutcome {
            name: v.name.clone(),
            training_size: size,
            dev,
            test,
            dev_score,
            test_score,
        });
    }

    let members: Vec<EnsembleMember> = variants
        .iter()
        .map(|v| EnsembleMember {
            name: v.name.clone(),
            dev: v.dev.clone(),
            test: v.test.clone(),
            individual_dev_score: v.dev_score,
        })
        .collect();
    let all: Vec<&EnsembleMember> = members.iter().collect();
    let average_dev = average_members(&all, Split::Dev)?;
    let average_test = average_members(&all, Split::Test)?;
    let ensemble = stepwise_prune_with(
        &members,
        |p| task_score(target, &p.values, &dev_gold),
        &cfg.ensemble,
    )?;
    for a in &ensemble.removal_log {
        log.push(format!(
            "ensemble: removing {} gives {:.6} ({})",
            a.name,
            a.score,
            if a.accepted { "accepted" } else { "rejected" }
        ));
    }
    log.push(format!("ensemble keeps {}", ensemble.kept.join(", ")));

    let mut report = ScoreReport::new("pearson");
    let task = target.task_id();
    for v in &variants {
        report.push(ScoreRow {
            task: task.clone(),
            model: v.name.clone(),
            dev: v.dev_score,
            test: v.test_score,
        })?;
    }
    report.push(ScoreRow {
        task: task.clone(),
        model: "average".into(),
        dev: ensemble.full_score,
        test: score_test(&average_test)?,
    })?;
    report.push(ScoreRow {
        task,
        model: "ensemble".into(),
        dev: ensemble.dev_score,
        test: score_test(&ensemble.averaged_test)?,
    })?;

    Ok(ExperimentOutcome {
        report,
        variants,
        average_dev,
        average_test,
        ensemble,
        selected_lexicons,
        silver_added,
        log,
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `predictions/`, `models/`, `report.tsv`, `manifest.tsv` and
/// `run.log` under `dir`.
pub fn write_outputs(cfg: &ExperimentConfig, outcome: &ExperimentOutcome, dir: &Path) -> Result<()> {
    let preds = dir.join("predictions");
    let models_dir = dir.join("models");
    for d in [&preds, &models_dir] {
        fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    let has_test = cfg.data.test.is_some() || !outcome.average_test.is_empty();
    let mut manifest = Vec::new();
    for v in &outcome.variants {
        let dev = format!("predictions/{}.dev.tsv", v.name);
        write(&dir.join(&dev), &v.dev.to_tsv())?;
        let test = if has_test {
            let test = format!("predictions/{}.test.tsv", v.name);
            write(&dir.join(&test), &v.test.to_tsv())?;
            Some(test.into())
        } else {
            None
        };
        manifest.push(ManifestEntry {
            name: v.name.clone(),
            dev: dev.into(),
            test,
            score: v.dev_score,
        });
    }
    for (name, dev, test) in [
        ("average", &outcome.average_dev, &outcome.average_test),
        ("ensemble", &outcome.ensemble.averaged_dev, &outcome.ensemble.averaged_test),
    ] {
        write(&preds.join(format!("{name}.dev.tsv")), &dev.to_tsv())?;
        if has_test {
            write(&preds.join(format!("{name}.test.tsv")), &test.to_tsv())?;
        }
    }
    for v in &cfg.variants {
        let spec = &cfg.models[&v.model];
        let mut text = spec.to_config("model");
        text.push_str(&format!("variant.name = {}\nvariant.runs = {}\n", v.name, cfg.runs));
        write(&models_dir.join(format!("{}.conf", v.name)), &text)?;
    }
    let ens = serde_json::to_string_pretty(&outcome.ensemble)
        .map_err(|e| Error::Computation(format!("serializing ensemble: {e}")))?;
    write(&models_dir.join("ensemble.json"), &ens)?;
    write(&dir.join("manifest.tsv"), &manifest_to_tsv(&manifest))?;
    write(&dir.join("report.tsv"), &outcome.report.to_tsv())?;
    let mut log = outcome.log.join("\n");
    log.push('\n');
    write(&dir.join("run.log"), &log)?;
    Ok(())
}

/// Validates `cfg`, runs it and writes its outputs to `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ScoreReport> {
    cfg.validate()?;
    let res = load_resources(cfg)?;
    let outcome = execute(cfg, &res)?;
    write_outputs(cfg, &outcome, &cfg.output)?;
    Ok(outcome.report)
}
