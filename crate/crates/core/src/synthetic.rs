//! Generated affect task with known structure, for smoke runs and
//! directional experiments.
//!
//! Tweets are drawn from a small pseudo-Spanish vocabulary. Affect words
//! carry a latent weight; a tweet's label is a squashed mean of its word
//! weights plus noise. Embeddings encode the weights noisily, a lexicon covers part
//! of the affect words, an English parallel set maps back through a complete
//! dictionary, and an unlabeled pool is drawn from the same distribution.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::augment::DictionaryTranslator;
use crate::config::{ExperimentConfig, Variant};
use crate::corpus::{save_dataset, AffectTarget, Dataset, Dimension, LabeledInstance, Origin, TaskKind, Tweet};
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::experiment::Resources;
use crate::lexicons::{Lexicon, DEFAULT_TAG};
use crate::models::PredictorSpec;
use crate::semisup::EmotionWordList;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub n_train: usize,
    pub n_dev: usize,
    pub n_test: usize,
    /// Labeled English tweets for translation.
    pub n_parallel: usize,
    /// Unlabeled tweets in the silver pool.
    pub n_pool: usize,
    pub n_affect: usize,
    pub n_neutral: usize,
    pub embedding_dim: usize,
    /// Standard deviation of the noise added to word vectors.
    pub embedding_noise: f64,
    /// Fraction of affect words listed in the lexicon.
    pub lexicon_coverage: f64,
    /// Standard deviation of the label noise.
    pub label_noise: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            seed: 0,
            n_train: 300,
            n_dev: 200,
            n_test: 200,
            n_parallel: 900,
            n_pool: 1500,
            n_affect: 80,
            n_neutral: 150,
            embedding_dim: 12,
            embedding_noise: 0.3,
            lexicon_coverage: 0.3,
            label_noise: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticTask {
    pub target: AffectTarget,
    pub train: Dataset,
    pub dev: Dataset,
    pub test: Dataset,
    /// English tweets with labels, to be translated.
    pub parallel: Dataset,
    /// English to Spanish word pairs.
    pub dictionary: Vec<(String, String)>,
    pub pool: Vec<Tweet>,
    pub annotation: EmotionWordList,
    /// Unlabeled tweets without any affect word, for word mining.
    pub background: Vec<Tweet>,
    pub lexicon: Lexicon,
    pub embeddings: EmbeddingTable,
}

const ES_SYLLABLES: [&str; 20] = [
    "ma", "lo", "ri", "ta", "ne", "su", "ca", "de", "vi", "ro", "la", "pe", "mi", "no", "sa", "te", "gu", "be", "fo",
    "ra",
];
const EN_SYLLABLES: [&str; 16] = [
    "bel", "dor", "fin", "gat", "hum", "kel", "lor", "mun", "pil", "rot", "sen", "tiv", "wex", "yor", "zap", "cug",
];

fn make_words(rng: &mut ChaCha8Rng, syllables: &[&str], n: usize, taken: &mut BTreeSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let len = rng.gen_range(2..=4);
        let w: String = (0..len).map(|_| *syllables.choose(rng).expect("nonempty")).collect();
        if taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

struct Vocabulary {
    es_affect: Vec<String>,
    en_affect: Vec<String>,
    weights: Vec<f64>,
    es_neutral: Vec<String>,
    en_neutral: Vec<String>,
}

impl Vocabulary {
    /// Raw text and label of one generated tweet.
    fn sample(&self, rng: &mut ChaCha8Rng, english: bool, noise: &Normal<f64>) -> (String, f64) {
        let (affect, neutral) = if english {
            (&self.en_affect, &self.en_neutral)
        } else {
            (&self.es_affect, &self.es_neutral)
        };
        let len = rng.gen_range(6..=12);
        let n_affect = rng.gen_range(1..=3);
        let mut words: Vec<&str> = Vec::with_capacity(len + 2);
        let mut sum = 0.0;
        for _ in 0..n_affect {
            let i = rng.gen_range(0..affect.len());
            sum += self.weights[i];
            words.push(&affect[i]);
        }
        while words.len() < len {
            words.push(neutral.choose(rng).expect("nonempty"));
        }
        words.shuffle(rng);
        let mut text = words.join(" ");
        match rng.gen_range(0..10) {
            0 => text = format!("@amigo {text}"),
            1 => text.push_str(" http://t.co/x"),
            2 => text.push_str(" !!"),
            3 => text.push_str(" 😀"),
            _ => {}
        }
        if rng.gen_bool(0.3) {
            let mut c = text.chars();
            if let Some(f) = c.next() {
                text = f.to_uppercase().chain(c).collect();
            }
        }
        let density = sum / len as f64;
        let label = (0.5 + 0.45 * (5.0 * density).tanh() + noise.sample(rng)).clamp(0.0, 1.0);
        (text, label)
    }
}

fn dataset(target: AffectTarget, prefix: &str, rows: Vec<(String, f64)>) -> Result<Dataset> {
    let instances = rows
        .into_iter()
        .enumerate()
        .map(|(i, (text, label))| LabeledInstance {
            tweet: Tweet::new(format!("{prefix}{i}"), text),
            label,
            origin: Origin::Gold,
        })
        .collect();
    Dataset::new(target, instances)
}

/// Generates a joy-intensity regression task.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticTask> {
    if spec.n_train == 0 || spec.n_dev < 2 || spec.n_affect < 4 || spec.n_neutral == 0 || spec.embedding_dim == 0 {
        return Err(Error::InvalidInput("synthetic task is too small".into()));
    }
    let target = AffectTarget::new(Dimension::Joy, TaskKind::Regression);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut taken = BTreeSet::new();
    let es_affect = make_words(&mut rng, &ES_SYLLABLES, spec.n_affect, &mut taken);
    let es_neutral = make_words(&mut rng, &ES_SYLLABLES, spec.n_neutral, &mut taken);
    let en_affect = make_words(&mut rng, &EN_SYLLABLES, spec.n_affect, &mut taken);
    let en_neutral = make_words(&mut rng, &EN_SYLLABLES, spec.n_neutral, &mut taken);
    // two thirds raise joy, one third lower it
    let weights: Vec<f64> = (0..spec.n_affect)
        .map(|i| {
            let m = rng.gen_range(0.3..1.0);
            if i % 3 == 2 {
                -m
            } else {
                m
            }
        })
        .collect();
    let vocab = Vocabulary {
        es_affect,
        en_affect,
        weights,
        es_neutral,
        en_neutral,
    };

    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let mut direction: Vec<f64> = (0..spec.embedding_dim).map(|_| unit.sample(&mut rng)).collect();
    let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    direction.iter_mut().for_each(|v| *v /= norm);
    let word_noise = Normal::new(0.0, spec.embedding_noise).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut embeddings = EmbeddingTable::new(spec.embedding_dim)?;
    for (i, w) in vocab.es_affect.iter().enumerate() {
        let v: Vec<f64> = direction
            .iter()
            .map(|d| vocab.weights[i] * d + word_noise.sample(&mut rng))
            .collect();
        embeddings.insert(w.clone(), &v)?;
    }
    for w in &vocab.es_neutral {
        let v: Vec<f64> = (0..spec.embedding_dim).map(|_| word_noise.sample(&mut rng)).collect();
        embeddings.insert(w.clone(), &v)?;
    }

    let covered = ((spec.n_affect as f64 * spec.lexicon_coverage).round() as usize).clamp(1, spec.n_affect);
    let lex_noise = Normal::new(0.0, 0.1).expect("valid normal");
    let lexicon = Lexicon::from_entries(
        "synthetic",
        (0..covered).map(|i| {
            let s = (vocab.weights[i] + lex_noise.sample(&mut rng)).clamp(-1.0, 1.0);
            (vocab.es_affect[i].clone(), DEFAULT_TAG.to_string(), s)
        }),
    )?;

    let label_noise = Normal::new(0.0, spec.label_noise).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut draw = |n: usize, english: bool| -> Vec<(String, f64)> {
        (0..n).map(|_| vocab.sample(&mut rng, english, &label_noise)).collect()
    };
    let train = dataset(target, "tr", draw(spec.n_train, false))?;
    let dev = dataset(target, "dv", draw(spec.n_dev, false))?;
    let test = dataset(target, "te", draw(spec.n_test, false))?;
    let parallel = dataset(target, "en", draw(spec.n_parallel, true))?;
    let pool: Vec<Tweet> = draw(spec.n_pool, false)
        .into_iter()
        .enumerate()
        .map(|(i, (text, _))| Tweet::new(format!("sv{i}"), text))
        .collect();
    let background: Vec<Tweet> = (0..spec.n_pool.max(50))
        .map(|i| {
            let len = rng.gen_range(6..=12);
            let words: Vec<&str> = (0..len)
                .map(|_| vocab.es_neutral.choose(&mut rng).expect("nonempty").as_str())
                .collect();
            Tweet::new(format!("bg{i}"), words.join(" "))
        })
        .collect();

    let dictionary = vocab
        .en_affect
        .iter()
        .zip(&vocab.es_affect)
        .chain(vocab.en_neutral.iter().zip(&vocab.es_neutral))
        .map(|(e, s)| (e.clone(), s.clone()))
        .collect();

    // joy words are the positive half; the rest mark sadness
    let mut annotation = EmotionWordList::new();
    for (w, &weight) in vocab.es_affect.iter().zip(&vocab.weights) {
        let emotion = if weight > 0.0 { Dimension::Joy } else { Dimension::Sadness };
        annotation.insert(emotion, w)?;
    }

    Ok(SyntheticTask {
        target,
        train,
        dev,
        test,
        parallel,
        dictionary,
        pool,
        annotation,
        background,
        lexicon,
        embeddings,
    })
}

impl SyntheticTask {
    pub fn translator(&self) -> DictionaryTranslator {
        DictionaryTranslator::new(self.dictionary.iter().cloned()).expect("generated words are single tokens")
    }

    /// In-memory resources with the parallel set translated and the pool
    /// narrowed to tweets containing an annotated joy word.
    pub fn resources(&self) -> Result<Resources> {
        let translated = crate::augment::translate_dataset(&self.parallel, &self.translator(), "en", "es")?.value;
        let mut sets = crate::semisup::build_silver_sets(&self.annotation, &self.pool);
        Ok(Resources {
            train: self.train.clone(),
            dev: self.dev.clone(),
            test: Some(self.test.clone()),
            embeddings: Some(Arc::new(self.embeddings.clone())),
            lexicons: vec![Arc::new(self.lexicon.clone())],
            translated: Some(translated),
            silver_pool: Some(sets.remove(&self.target.dimension).unwrap_or_default()),
            log: Vec::new(),
        })
    }

    /// Writes every artifact plus `smoke.conf` to `dir`; returns the
    /// config path.
    pub fn write_to(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let w = |name: &str, text: String| -> Result<()> {
            let p = dir.join(name);
            fs::write(&p, text).map_err(|e| Error::io(&p, e))
        };
        save_dataset(&self.train, &dir.join("train.tsv"))?;
        save_dataset(&self.dev, &dir.join("dev.tsv"))?;
        save_dataset(&self.test, &dir.join("test.tsv"))?;
        save_dataset(&self.parallel, &dir.join("parallel_en.tsv"))?;
        w("dictionary.tsv", self.translator().to_tsv())?;
        let lines = |tweets: &[Tweet]| -> String { tweets.iter().map(|t| format!("{}\t{}\n", t.id, t.raw)).collect() };
        w("pool.txt", lines(&self.pool))?;
        w("background.txt", lines(&self.background))?;
        w("annotation.tsv", self.annotation.to_tsv())?;
        w("lexicon.tsv", self.lexicon.to_tsv())?;
        self.embeddings.save(&dir.join("embeddings.txt"))?;
        let path = dir.join("smoke.conf");
        w("smoke.conf", smoke_config_text())?;
        Ok(path)
    }
}

/// Small, fast models for the synthetic task.
pub fn synthetic_config(seed: u64) -> ExperimentConfig {
    let target = AffectTarget::new(Dimension::Joy, TaskKind::Regression);
    let mut cfg = ExperimentConfig::for_task(target);
    cfg.seed = seed;
    cfg.runs = 3;
    cfg.models.insert("svm".into(), PredictorSpec::kernel_svr(0.05));
    let mut ff = PredictorSpec::feed_forward(vec![32, 16]);
    ff.epochs = 60;
    cfg.models.insert("ff".into(), ff);
    cfg.selftrain.k = 5;
    cfg.selftrain.threshold = 0.1;
    cfg.selftrain.max_added = 600;
    cfg.variants = ["svm", "svm-t", "svm-s", "ff"]
        .iter()
        .map(|n| cfg.resolve_variant(n).expect("configured model"))
        .collect::<Vec<Variant>>();
    cfg
}

/// Config text that runs [`synthetic_config`] on the files written by
/// [`SyntheticTask::write_to`].
pub fn smoke_config_text() -> String {
    let mut cfg = synthetic_config(1);
    cfg.output = "out".into();
    let d = &mut cfg.data;
    d.train = Some("train.tsv".into());
    d.dev = Some("dev.tsv".into());
    d.test = Some("test.tsv".into());
    d.parallel = Some("parallel_en.tsv".into());
    d.silver = Some("pool.txt".into());
    d.annotation = Some("annotation.tsv".into());
    cfg.translate.dictionary = Some("dictionary.tsv".into());
    cfg.embeddings = Some("embeddings.txt".into());
    cfg.lexicons = vec![("synthetic".into(), "lexicon.tsv".into())];
    format!("# Smoke experiment on the generated task.\n{}", cfg.to_text())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let spec = SyntheticSpec {
            n_pool: 50,
            ..SyntheticSpec::default()
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.dictionary, b.dictionary);
        assert_eq!(a.train.len(), 300);
        assert_eq!(a.dev.len(), 200);
        let c = generate(&SyntheticSpec { seed: 1, ..spec }).unwrap();
        assert_ne!(a.train, c.train);
    }

    #[test]
    fn translation_recovers_spanish_vocabulary() {
        let task = generate(&SyntheticSpec {
            n_pool: 20,
            ..SyntheticSpec::default()
        })
        .unwrap();
        let res = task.resources().unwrap();
        let translated = res.translated.unwrap();
        assert_eq!(translated.len(), task.parallel.len());
        let known = translated
            .tweets()
            .flat_map(|t| &t.tokens)
            .filter(|w| w.as_str() != crate::corpus::URL_TOKEN && w.chars().all(char::is_alphabetic))
            .all(|w| task.embeddings.get(w).is_some());
        assert!(known);
    }

    #[test]
    fn smoke_config_parses() {
        let cfg = ExperimentConfig::parse(&smoke_config_text(), Path::new("smoke.conf")).unwrap();
        assert_eq!(cfg.variants.len(), 4);
        assert_eq!(cfg.models["ff"].layers, [32, 16]);
    }
}
