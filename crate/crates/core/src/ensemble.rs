//! Prediction averaging and stepwise ensemble pruning.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::pearson_or_zero;
use crate::models::PredictionSet;

/// Minimum dev-score improvement for a removal to be accepted.
pub const DEFAULT_MIN_GAIN: f64 = 0.002;

/// Slack on the gain comparison so that a gain equal to `min_gain` up to
/// rounding (0.718 - 0.716 is 0.0020000000000000018) counts as equal.
pub const GAIN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Dev,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub name: String,
    pub dev: PredictionSet,
    /// Empty when there is no test split.
    pub test: PredictionSet,
    pub individual_dev_score: f64,
}

impl EnsembleMember {
    pub fn predictions(&self, split: Split) -> &PredictionSet {
        match split {
            Split::Dev => &self.dev,
            Split::Test => &self.test,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OnReject {
    /// End pruning at the first rejected removal.
    #[default]
    Stop,
    /// Keep the member and go on to the next one.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PruneOptions {
    pub min_gain: f64,
    pub on_reject: OnReject,
}

impl Default for PruneOptions {
    fn default() -> Self {
        PruneOptions {
            min_gain: DEFAULT_MIN_GAIN,
            on_reject: OnReject::Stop,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalAttempt {
    pub name: String,
    /// Score of the ensemble without this member.
    pub score: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    /// Surviving members in input order.
    pub kept: Vec<String>,
    pub full_score: f64,
    pub dev_score: f64,
    pub averaged_dev: PredictionSet,
    pub averaged_test: PredictionSet,
    pub removal_log: Vec<RemovalAttempt>,
}

/// Element-wise mean of the members' predictions on `split`.
pub fn average_members(members: &[&EnsembleMember], split: Split) -> Result<PredictionSet> {
    let first = members
        .first()
        .ok_or_else(|| Error::InvalidInput("empty ensemble".into()))?
        .predictions(split);
    let mut acc = vec![0.0; first.len()];
    for m in members {
        let p = m.predictions(split);
        if p.ids != first.ids {
            return Err(Error::InvalidInput(format!(
                "member {:?} has {:?} predictions misaligned with {:?}",
                m.name, split, members[0].name
            )));
        }
        for (a, v) in acc.iter_mut().zip(&p.values) {
            *a += v;
        }
    }
    let n = members.len() as f64;
    PredictionSet::new(first.ids.clone(), acc.into_iter().map(|a| a / n).collect())
}

/// Members in the order removals are tried: ascending individual score,
/// ties by name.
pub fn removal_order(members: &[EnsembleMember]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| {
        let (ma, mb) = (&members[a], &members[b]);
        ma.individual_dev_score
            .total_cmp(&mb.individual_dev_score)
            .then_with(|| ma.name.cmp(&mb.name))
    });
    order
}

/// Greedy pruning with an arbitrary score of the averaged dev predictions.
/// Starting from the full average, the weakest remaining member is removed
/// when that raises the score by more than `min_gain` over the best so far.
/// The last member is never removed.
pub fn stepwise_prune_with<F>(members: &[EnsembleMember], mut score: F, options: &PruneOptions) -> Result<EnsembleResult>
where
    F: FnMut(&PredictionSet) -> Result<f64>,
{
    if members.is_empty() {
        return Err(Error::InvalidInput("empty ensemble".into()));
    }
    for m in members {
        if !m.individual_dev_score.is_finite() {
            return Err(Error::InvalidInput(format!("member {:?} has a non-finite score", m.name)));
        }
    }
    let mut active = vec![true; members.len()];
    let subset = |active: &[bool]| -> Vec<&EnsembleMember> {
        members.iter().zip(active).filter(|(_, a)| **a).map(|(m, _)| m).collect()
    };
    let full_score = score(&average_members(&subset(&active), Split::Dev)?)?;
    let mut best = full_score;
    let mut remaining = members.len();
    let mut log = Vec::new();

    for idx in removal_order(members) {
        if remaining == 1 {
            break;
        }
        active[idx] = false;
        let s = score(&average_members(&subset(&active), Split::Dev)?)?;
        let accepted = s - best - options.min_gain > GAIN_TOLERANCE;
        log.push(RemovalAttempt {
            name: members[idx].name.clone(),
            score: s,
            accepted,
        });
        if accepted {
            best = s;
            remaining -= 1;
        } else {
            active[idx] = true;
            if options.on_reject == OnReject::Stop {
                break;
            }
        }
    }

    let kept = subset(&active);
    Ok(EnsembleResult {
        kept: kept.iter().map(|m| m.name.clone()).collect(),
        full_score,
        dev_score: best,
        averaged_dev: average_members(&kept, Split::Dev)?,
        averaged_test: average_members(&kept, Split::Test)?,
        removal_log: log,
    })
}

/// [`stepwise_prune_with`] scored by Pearson against `dev_gold`.
pub fn stepwise_prune(members: &[EnsembleMember], dev_gold: &[f64], min_gain: f64) -> Result<EnsembleResult> {
    let options = PruneOptions {
        min_gain,
        ..PruneOptions::default()
    };
    stepwise_prune_with(members, |p| pearson_or_zero(&p.values, dev_gold), &options)
}

/// One row of a member manifest: name, prediction files and dev score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub dev: PathBuf,
    pub test: Option<PathBuf>,
    pub score: f64,
}

/// `name<TAB>dev_path<TAB>test_path<TAB>score`, `-` for a missing test file.
pub fn manifest_to_tsv(entries: &[ManifestEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        let test = e.test.as_ref().map_or("-".to_string(), |p| p.display().to_string());
        let _ = writeln!(out, "{}\t{}\t{}\t{}", e.name, e.dev.display(), test, e.score);
    }
    out
}

pub fn parse_manifest(text: &str, path: &Path) -> Result<Vec<ManifestEntry>> {
    let mut out: Vec<ManifestEntry> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let c: Vec<&str> = line.split('\t').collect();
        if c.len() != 4 {
            return Err(Error::parse(path, i + 1, "expected name<TAB>dev<TAB>test<TAB>score"));
        }
        let score: f64 = c[3]
            .trim()
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| Error::parse(path, i + 1, format!("bad score {:?}", c[3])))?;
        if out.iter().any(|e| e.name == c[0]) {
            return Err(Error::parse(path, i + 1, format!("duplicate member {:?}", c[0])));
        }
        out.push(ManifestEntry {
            name: c[0].to_string(),
            dev: PathBuf::from(c[1]),
            test: (c[2] != "-").then(|| PathBuf::from(c[2])),
            score,
        });
    }
    Ok(out)
}

/// Reads a manifest and its prediction files. Relative paths are resolved
/// against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<EnsembleMember>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text, path)?
        .into_iter()
        .map(|e| {
            let dev = PredictionSet::load(&base.join(&e.dev))?;
            let test = match &e.test {
                Some(t) => PredictionSet::load(&base.join(t))?,
                None => PredictionSet::new(Vec::new(), Vec::new())?,
            };
            Ok(EnsembleMember {
                name: e.name,
                dev,
                test,
                individual_dev_score: e.score,
            })
        })
        .collect()
}
