//! Label-preserving data augmentation by translation.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::time::Duration;

use rayon::prelude::*;

use crate::corpus::{Dataset, LabeledInstance, Origin, Tweet};
use crate::error::{Error, Result};
use crate::lexicons::Lexicon;

/// Fraction of failed instances above which a translation run aborts.
pub const MAX_SKIP_FRACTION: f64 = 0.5;

/// Anything that turns text in one language into text in another.
pub trait Translator: Sync {
    fn translate(&self, text: &str, source: &str, target: &str) -> Result<String>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityTranslator;

impl Translator for IdentityTranslator {
    fn translate(&self, text: &str, _source: &str, _target: &str) -> Result<String> {
        Ok(text.to_string())
    }
}

fn is_word(s: &str) -> bool {
    !s.is_empty() && !s.contains(char::is_whitespace)
}

/// Word-for-word substitution. Unknown words pass through unchanged, so the
/// number of whitespace-separated tokens never changes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DictionaryTranslator {
    mapping: HashMap<String, String>,
}

impl DictionaryTranslator {
    pub fn new<I, S, T>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut mapping = HashMap::new();
        for (s, t) in pairs {
            let (s, t) = (s.into(), t.into());
            if !is_word(&s) || !is_word(&t) {
                return Err(Error::InvalidInput(format!(
                    "dictionary entries must be single words, got {s:?} -> {t:?}"
                )));
            }
            mapping.insert(s, t);
        }
        Ok(DictionaryTranslator { mapping })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// `source<TAB>target` per line; blank lines and `#` comments skipped.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(s), Some(t), None) if is_word(s.trim()) && is_word(t.trim()) => {
                    pairs.push((s.trim().to_string(), t.trim().to_string()))
                }
                _ => return Err(Error::parse(path, i + 1, "expected source<TAB>target with single words")),
            }
        }
        Self::new(pairs)
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        let sorted: BTreeMap<_, _> = self.mapping.iter().collect();
        sorted.iter().map(|(s, t)| format!("{s}\t{t}\n")).collect()
    }

    fn word<'a>(&'a self, w: &'a str) -> &'a str {
        if let Some(t) = self.mapping.get(w) {
            return t;
        }
        let lower = w.to_lowercase();
        self.mapping.get(&lower).map_or(w, String::as_str)
    }
}

impl Translator for DictionaryTranslator {
    fn translate(&self, text: &str, _source: &str, _target: &str) -> Result<String> {
        Ok(text
            .split_whitespace()
            .map(|w| self.word(w))
            .collect::<Vec<_>>()
            .join(" "))
    }
}

/// Client for a plain-text translation endpoint at `{base_url}/{src}-{tgt}`.
/// The request body is the source text and the response body is the
/// translation. Failed requests are retried twice.
#[derive(Debug, Clone)]
pub struct RemoteTranslator {
    base_url: String,
    agent: ureq::Agent,
    attempts: usize,
}

impl RemoteTranslator {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self::with_timeout(base_url, Duration::from_secs(30))
    }

    pub fn with_timeout(base_url: impl Into<String>, timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build();
        RemoteTranslator {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            agent: config.into(),
            attempts: 3,
        }
    }

    pub fn endpoint(&self, source: &str, target: &str) -> String {
        format!("{}/{source}-{target}", self.base_url)
    }

    fn request(&self, url: &str, text: &str) -> std::result::Result<String, String> {
        let mut resp = self
            .agent
            .post(url)
            .header("Content-Type", "text/plain; charset=utf-8")
            .send(text)
            .map_err(|e| e.to_string())?;
        resp.body_mut().read_to_string().map_err(|e| e.to_string())
    }
}

impl Translator for RemoteTranslator {
    fn translate(&self, text: &str, source: &str, target: &str) -> Result<String> {
        let url = self.endpoint(source, target);
        let mut last = String::new();
        for _ in 0..self.attempts {
            match self.request(&url, text) {
                Ok(body) => return Ok(body.trim_end_matches(['\r', '\n']).to_string()),
                Err(e) => last = e,
            }
        }
        Err(Error::Translation(format!(
            "{url}: {last} (after {} attempts)",
            self.attempts
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Translated<T> {
    pub value: T,
    /// Ids (or keys) whose translation failed, in input order.
    pub skipped: Vec<String>,
}

fn check_skips(skipped: usize, total: usize) -> Result<()> {
    if total > 0 && skipped as f64 > MAX_SKIP_FRACTION * total as f64 {
        return Err(Error::Translation(format!(
            "{skipped} of {total} items failed to translate"
        )));
    }
    Ok(())
}

/// Translates every tweet, re-tokenizes the result and copies the label.
/// Requests run concurrently; output order follows input order.
pub fn translate_dataset(
    data: &Dataset,
    translator: &dyn Translator,
    source: &str,
    target: &str,
) -> Result<Translated<Dataset>> {
    let results: Vec<Result<String>> = data
        .instances()
        .par_iter()
        .map(|inst| translator.translate(&inst.tweet.raw, source, target))
        .collect();
    let mut instances = Vec::with_capacity(results.len());
    let mut skipped = Vec::new();
    for (inst, res) in data.instances().iter().zip(results) {
        match res {
            Ok(text) => instances.push(LabeledInstance {
                tweet: Tweet::new(inst.tweet.id.clone(), text),
                label: inst.label,
                origin: Origin::Translated,
            }),
            Err(_) => skipped.push(inst.tweet.id.clone()),
        }
    }
    check_skips(skipped.len(), data.len())?;
    Ok(Translated {
        value: Dataset::new(data.target(), instances)?,
        skipped,
    })
}

/// Gold instances followed by `extra`, origins preserved.
pub fn merge_training(gold: &Dataset, extra: &Dataset) -> Result<Dataset> {
    if gold.target() != extra.target() {
        return Err(Error::InvalidInput(format!(
            "cannot merge {} data into {} data",
            extra.target().task_id(),
            gold.target().task_id()
        )));
    }
    let mut all = gold.instances().to_vec();
    all.extend_from_slice(extra.instances());
    Dataset::new(gold.target(), all)
}

/// Translates lexicon keys. Keys that collide after translation keep, per
/// tag, the score with the largest magnitude.
pub fn translate_lexicon(
    lex: &Lexicon,
    translator: &dyn Translator,
    source: &str,
    target: &str,
) -> Result<Translated<Lexicon>> {
    let keys: Vec<&str> = {
        let mut k: Vec<&str> = lex.entries().map(|(t, _, _)| t).collect();
        k.dedup();
        k
    };
    let results: Vec<Result<String>> = keys
        .par_iter()
        .map(|k| translator.translate(k, source, target))
        .collect();
    let mut merged: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut skipped = Vec::new();
    for (key, res) in keys.iter().zip(results) {
        let new_key = match res {
            Ok(t) if !t.trim().is_empty() => t.trim().to_lowercase(),
            _ => {
                skipped.push(key.to_string());
                continue;
            }
        };
        for (tag, score) in lex.get(key).into_iter().flatten() {
            merged
                .entry((new_key.clone(), tag.clone()))
                .and_modify(|cur| {
                    if score.abs() > cur.abs() {
                        *cur = *score;
                    }
                })
                .or_insert(*score);
        }
    }
    check_skips(skipped.len(), keys.len())?;
    let rows = merged.into_iter().map(|((tok, tag), s)| (tok, tag, s));
    Ok(Translated {
        value: Lexicon::from_entries(lex.name(), rows)?,
        skipped,
    })
}
