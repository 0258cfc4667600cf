//! Emotion-word mining, silver-set assignment and agreement-filtered
//! self-training.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, Dimension, LabeledInstance, Origin, Tweet, URL_TOKEN, USER_TOKEN};
use crate::error::{Error, Result};
use crate::features::FeatureSpec;
use crate::models::{self, PredictorSpec, TrainedPredictor};

/// Annotated indicator words per emotion.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EmotionWordList {
    words: BTreeMap<Dimension, BTreeSet<String>>,
    /// Mined ranking the annotation was made from, if known.
    pub ranking: Vec<(String, f64)>,
}

impl EmotionWordList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `word` to `emotion`; a word already assigned to another emotion
    /// is an error.
    pub fn insert(&mut self, emotion: Dimension, word: &str) -> Result<()> {
        if !emotion.is_emotion() {
            return Err(Error::InvalidInput("valence has no indicator words".into()));
        }
        let word = word.trim().to_lowercase();
        if let Some(other) = self.emotion_of(&word) {
            if other != emotion {
                return Err(Error::InvalidInput(format!(
                    "{word:?} is annotated as both {other} and {emotion}"
                )));
            }
        }
        self.words.entry(emotion).or_default().insert(word);
        Ok(())
    }

    pub fn emotion_of(&self, word: &str) -> Option<Dimension> {
        self.words
            .iter()
            .find(|(_, set)| set.contains(word))
            .map(|(e, _)| *e)
    }

    pub fn words(&self, emotion: Dimension) -> impl Iterator<Item = &str> {
        self.words.get(&emotion).into_iter().flatten().map(String::as_str)
    }

    pub fn count(&self, emotion: Dimension) -> usize {
        self.words.get(&emotion).map_or(0, BTreeSet::len)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// `word<TAB>emotion` rows with emotion one of the four emotions or
    /// `discard`.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut list = EmotionWordList::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 || cols[0].trim().is_empty() {
                return Err(Error::parse(path, i + 1, "expected word<TAB>emotion"));
            }
            let label = cols[1].trim();
            if label == "discard" {
                continue;
            }
            let emotion: Dimension = label
                .parse()
                .ok()
                .filter(|d: &Dimension| d.is_emotion())
                .ok_or_else(|| Error::parse(path, i + 1, format!("unknown emotion {label:?}")))?;
            list.insert(emotion, cols[0])
                .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        }
        Ok(list)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (e, set) in &self.words {
            for w in set {
                out.push_str(&format!("{w}\t{e}\n"));
            }
        }
        out
    }
}

fn is_content_word(token: &str) -> bool {
    token != URL_TOKEN && token != USER_TOKEN && token.chars().any(char::is_alphabetic)
}

/// Token counts over the distinct tweets of a corpus, and their total.
fn word_counts(corpus: &[Tweet]) -> (HashMap<&str, usize>, usize) {
    let mut seen: HashSet<&[String]> = HashSet::new();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut total = 0;
    for t in corpus {
        if !seen.insert(t.tokens.as_slice()) {
            continue;
        }
        for tok in &t.tokens {
            total += 1;
            if is_content_word(tok) {
                *counts.entry(tok.as_str()).or_default() += 1;
            }
        }
    }
    (counts, total)
}

/// Ranks words of `target` by `((f_t + 1) / N_t) / ((f_b + 1) / N_b)` where
/// `f` is a word's count and `N` the token count of each corpus. Repeated
/// tweets are counted once. Ties are broken alphabetically.
pub fn mine_indicator_words(target: &[Tweet], background: &[Tweet], top_n: usize) -> Result<Vec<(String, f64)>> {
    if target.is_empty() || background.is_empty() {
        return Err(Error::InvalidInput("both corpora must be nonempty".into()));
    }
    let (ft, nt) = word_counts(target);
    let (fb, nb) = word_counts(background);
    if nt == 0 || nb == 0 {
        return Err(Error::InvalidInput("a corpus has no tokens".into()));
    }
    let mut ranked: Vec<(String, f64)> = ft
        .iter()
        .map(|(w, &c)| {
            let b = fb.get(w).copied().unwrap_or(0);
            let ratio = ((c + 1) as f64 / nt as f64) / ((b + 1) as f64 / nb as f64);
            (w.to_string(), ratio)
        })
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(top_n);
    Ok(ranked)
}

/// Tweets containing at least one indicator word of each emotion. A tweet
/// matching several emotions appears in all of their sets.
pub fn build_silver_sets(words: &EmotionWordList, corpus: &[Tweet]) -> BTreeMap<Dimension, Vec<Tweet>> {
    let mut sets: BTreeMap<Dimension, Vec<Tweet>> =
        Dimension::EMOTIONS.iter().map(|&e| (e, Vec::new())).collect();
    for tweet in corpus {
        let hits: BTreeSet<Dimension> = tweet.tokens.iter().filter_map(|t| words.emotion_of(t)).collect();
        for e in hits {
            sets.get_mut(&e).expect("all emotions present").push(tweet.clone());
        }
    }
    sets
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfTrainConfig {
    /// Number of agreement models.
    pub k: usize,
    /// Largest allowed spread between the highest and lowest prediction.
    pub threshold: f64,
    pub max_added: usize,
    /// Seed of the first agreement model; model `i` uses `seed + i`.
    pub seed: u64,
}

impl Default for SelfTrainConfig {
    fn default() -> Self {
        SelfTrainConfig {
            k: 10,
            threshold: 0.1,
            max_added: 2500,
            seed: 0,
        }
    }
}

impl SelfTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config(format!("self-training needs k >= 2, got {}", self.k)));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(Error::Config(format!(
                "self-training threshold must be positive, got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilverCandidate {
    pub tweet: Tweet,
    pub predictions: Vec<f64>,
    pub spread: f64,
    pub proposed_label: f64,
}

impl SilverCandidate {
    /// Spread and mean of `predictions`, summed in order.
    pub fn new(tweet: Tweet, predictions: Vec<f64>) -> Self {
        let max = predictions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = predictions.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = predictions.iter().sum::<f64>() / predictions.len() as f64;
        SilverCandidate {
            tweet,
            spread: max - min,
            proposed_label: mean.clamp(min, max),
            predictions,
        }
    }
}

/// Keeps tweets whose predictions spread by at most `threshold`, most
/// confident first, at most `max_added` of them. `predictions[m][i]` is model
/// `m`'s prediction for tweet `i`.
pub fn select_agreeing(
    tweets: &[Tweet],
    predictions: &[Vec<f64>],
    threshold: f64,
    max_added: usize,
) -> Result<Vec<SilverCandidate>> {
    if predictions.is_empty() {
        return Err(Error::InvalidInput("no agreement models".into()));
    }
    if let Some(p) = predictions.iter().find(|p| p.len() != tweets.len()) {
        return Err(Error::InvalidInput(format!(
            "{} predictions for {} tweets",
            p.len(),
            tweets.len()
        )));
    }
    let mut kept: Vec<SilverCandidate> = tweets
        .iter()
        .enumerate()
        .map(|(i, t)| SilverCandidate::new(t.clone(), predictions.iter().map(|p| p[i]).collect()))
        .filter(|c| c.spread <= threshold)
        .collect();
    kept.sort_by(|a, b| a.spread.total_cmp(&b.spread));
    kept.truncate(max_added);
    Ok(kept)
}

/// Trains the `cfg.k` agreement models, which differ only by seed.
pub fn train_committee(
    trainer: &PredictorSpec,
    features: &FeatureSpec,
    train: &Dataset,
    cfg: &SelfTrainConfig,
) -> Result<Vec<TrainedPredictor>> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::InvalidInput("self-training needs training data".into()));
    }
    let x = features.featurize_all(train.tweets());
    let y = train.labels();
    (0..cfg.k)
        .into_par_iter()
        .map(|m| {
            let spec = trainer.with_seed(cfg.seed + m as u64);
            models::train(&spec, &x, &y).map_err(|e| Error::training(format!("agreement model {m}"), e))
        })
        .collect()
}

/// Predictions of every committee member on `silver`, one row per model.
pub fn committee_predictions(
    committee: &[TrainedPredictor],
    features: &FeatureSpec,
    silver: &[Tweet],
) -> Result<Vec<Vec<f64>>> {
    let ids: Vec<String> = silver.iter().map(|t| t.id.clone()).collect();
    let x = features.featurize_all(silver);
    committee
        .par_iter()
        .map(|m| m.predict(&ids, &x).map(|p| p.values))
        .collect()
}

/// Labels `silver` with the mean prediction of `cfg.k` models trained on
/// `train`, keeping only tweets the models agree on.
pub fn filter_silver(
    silver: &[Tweet],
    trainer: &PredictorSpec,
    features: &FeatureSpec,
    train: &Dataset,
    cfg: &SelfTrainConfig,
) -> Result<Vec<SilverCandidate>> {
    let committee = train_committee(trainer, features, train, cfg)?;
    let preds = committee_predictions(&committee, features, silver)?;
    select_agreeing(silver, &preds, cfg.threshold, cfg.max_added)
}

/// `train` followed by the candidates as silver instances.
pub fn self_train(train: &Dataset, candidates: &[SilverCandidate]) -> Result<Dataset> {
    let mut all = train.instances().to_vec();
    for c in candidates {
        if !(0.0..=1.0).contains(&c.proposed_label) {
            return Err(Error::InvalidInput(format!(
                "silver label {} of {:?} outside [0,1]",
                c.proposed_label, c.tweet.id
            )));
        }
        all.push(LabeledInstance {
            tweet: c.tweet.clone(),
            label: c.proposed_label,
            origin: Origin::Silver,
        });
    }
    Dataset::new(train.target(), all)
}
