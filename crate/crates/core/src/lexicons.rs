//! Affect lexicons, lexicon feature blocks and forward selection of the
//! lexicon subset used for a task.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::Tweet;
use crate::error::{Error, Result};
use crate::features::{FeatureSpec, FeatureVector};
use crate::models::{cross_val_score, PredictorSpec};

pub const DEFAULT_TAG: &str = "default";

/// Statistics per (lexicon, dimension tag), in layout order.
pub const STATS: [&str; 4] = ["sum", "count", "max", "last"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    name: String,
    entries: BTreeMap<String, BTreeMap<String, f64>>,
    tags: BTreeSet<String>,
}

impl Lexicon {
    /// Builds a lexicon from `(token, tag, score)` rows; later duplicates of
    /// a `(token, tag)` pair replace earlier ones.
    pub fn from_entries<I, S, T>(name: impl Into<String>, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T, f64)>,
        S: AsRef<str>,
        T: Into<String>,
    {
        let mut entries: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        let mut tags = BTreeSet::new();
        for (token, tag, score) in rows {
            if !score.is_finite() {
                return Err(Error::InvalidInput("non-finite lexicon score".into()));
            }
            let tag = tag.into();
            tags.insert(tag.clone());
            entries
                .entry(token.as_ref().to_lowercase())
                .or_default()
                .insert(tag, score);
        }
        if entries.is_empty() {
            return Err(Error::InvalidInput("empty lexicon".into()));
        }
        Ok(Lexicon {
            name: name.into(),
            entries,
            tags,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.tags.iter().map(String::as_str)
    }

    pub fn get(&self, token: &str) -> Option<&BTreeMap<String, f64>> {
        self.entries.get(token)
    }

    pub fn score(&self, token: &str, tag: &str) -> Option<f64> {
        self.entries.get(token)?.get(tag).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.entries
            .iter()
            .flat_map(|(tok, m)| m.iter().map(move |(tag, s)| (tok.as_str(), tag.as_str(), *s)))
    }

    pub fn feature_width(&self) -> usize {
        self.tags.len() * STATS.len()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (tok, tag, s) in self.entries() {
            let _ = writeln!(out, "{tok}\t{tag}\t{s}");
        }
        out
    }
}

/// Reads `token<TAB>dimension<TAB>score` rows (`token<TAB>score` implies the
/// `default` dimension). Lines starting with `#` are comments.
pub fn load_lexicon(path: &Path, name: &str) -> Result<Lexicon> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lexicon(&text, path, name)
}

pub fn parse_lexicon(text: &str, path: &Path, name: &str) -> Result<Lexicon> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let (token, tag, score) = match cols.as_slice() {
            [tok, score] => (*tok, DEFAULT_TAG, *score),
            [tok, tag, score] => (*tok, tag.trim(), *score),
            _ => {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("expected 2 or 3 columns, found {}", cols.len()),
                ))
            }
        };
        let score: f64 = score
            .trim()
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::parse(path, lineno, format!("non-numeric score {score:?}")))?;
        rows.push((token.trim().to_string(), tag.to_string(), score));
    }
    if rows.is_empty() {
        return Err(Error::parse(path, 0, "empty lexicon"));
    }
    Lexicon::from_entries(name, rows)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TagStats {
    pub sum: f64,
    pub match_count: usize,
    pub max_score: f64,
    /// Score of the last token in the tweet that matched.
    pub last_token_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconFeatureBlock {
    pub lexicon_name: String,
    /// One entry per dimension tag of the lexicon, sorted by tag.
    pub per_tag: Vec<(String, TagStats)>,
}

impl LexiconFeatureBlock {
    pub fn compute(tweet: &Tweet, lexicon: &Lexicon) -> Self {
        let per_tag = lexicon
            .tags()
            .map(|tag| {
                let mut st = TagStats::default();
                for tok in &tweet.tokens {
                    if let Some(s) = lexicon.score(tok, tag) {
                        st.sum += s;
                        st.max_score = if st.match_count == 0 { s } else { st.max_score.max(s) };
                        st.last_token_score = s;
                        st.match_count += 1;
                    }
                }
                (tag.to_string(), st)
            })
            .collect();
        LexiconFeatureBlock {
            lexicon_name: lexicon.name().to_string(),
            per_tag,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.per_tag
            .iter()
            .flat_map(|(_, s)| [s.sum, s.match_count as f64, s.max_score, s.last_token_score])
            .collect()
    }

    pub fn into_features(self) -> FeatureVector {
        FeatureVector::new(format!("lexicon:{}", self.lexicon_name), self.values())
    }
}

/// One lexicon block per lexicon, concatenated in the given order.
pub fn featurize(tweet: &Tweet, lexicons: &[&Lexicon]) -> FeatureVector {
    let mut out = FeatureVector::empty();
    for lex in lexicons {
        out.append(LexiconFeatureBlock::compute(tweet, lex).into_features());
    }
    out
}

/// Outcome of forward selection, with the scores behind each decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Indices into the candidate list, in the order they were added.
    pub selected: Vec<usize>,
    pub base_score: f64,
    /// Individual gain of every candidate over the base features.
    pub gains: Vec<f64>,
    /// Cumulative score after each attempted addition, with its decision.
    pub steps: Vec<(usize, f64, bool)>,
}

/// Two-phase greedy selection over an abstract scorer. `score(subset)`
/// returns the score of the base features plus the candidates in `subset`
/// (the empty subset is the base alone).
///
/// Phase 1 keeps candidates whose individual gain is positive. Phase 2 adds
/// them by descending gain (ties by `names`) while the cumulative score
/// strictly increases and stops at the first addition that does not help.
pub fn forward_select_by<F>(names: &[&str], mut score: F) -> Result<Selection>
where
    F: FnMut(&[usize]) -> Result<f64>,
{
    let base_score = score(&[])?;
    let gains = (0..names.len())
        .map(|i| Ok(score(&[i])? - base_score))
        .collect::<Result<Vec<f64>>>()?;

    let mut survivors: Vec<usize> = (0..names.len()).filter(|&i| gains[i] > 0.0).collect();
    survivors.sort_by(|&a, &b| {
        gains[b]
            .partial_cmp(&gains[a])
            .unwrap_or(Ordering::Equal)
            .then_with(|| names[a].cmp(names[b]))
    });

    let mut selected = Vec::new();
    let mut steps = Vec::new();
    let mut current = base_score;
    for cand in survivors {
        let mut trial = selected.clone();
        trial.push(cand);
        // a single survivor's cumulative score is its individual score
        let s = if selected.is_empty() {
            base_score + gains[cand]
        } else {
            score(&trial)?
        };
        let accepted = s > current;
        steps.push((cand, s, accepted));
        if !accepted {
            break;
        }
        selected = trial;
        current = s;
    }
    Ok(Selection {
        selected,
        base_score,
        gains,
        steps,
    })
}

/// Selects lexicons by cross-validated Pearson of `trainer` on `data`.
/// A base feature set of zero width scores 0.
pub fn forward_select(
    candidates: &[Arc<Lexicon>],
    base: &FeatureSpec,
    trainer: &PredictorSpec,
    data: &crate::corpus::Dataset,
    folds: usize,
) -> Result<(Vec<Arc<Lexicon>>, Selection)> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("no candidate lexicons".into()));
    }
    if folds < 2 {
        return Err(Error::InvalidInput("forward selection needs at least 2 folds".into()));
    }
    let labels = data.labels();
    let names: Vec<&str> = candidates.iter().map(|l| l.name()).collect();
    let selection = forward_select_by(&names, |subset| {
        let mut spec = base.clone();
        for &i in subset {
            spec = spec.with_lexicon(candidates[i].clone());
        }
        if spec.width() == 0 {
            return Ok(0.0);
        }
        let x = spec.featurize_all(data.tweets());
        cross_val_score(trainer, &x, &labels, folds)
    })?;
    let chosen = selection
        .selected
        .iter()
        .map(|&i| candidates[i].clone())
        .collect();
    Ok((chosen, selection))
}
