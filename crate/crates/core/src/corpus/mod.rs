//! Tweets, affect targets and labeled datasets.

mod tokenizer;

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{class_to_unit, to_ordinal};

pub use tokenizer::{tokenize, URL_TOKEN, USER_TOKEN};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub raw: String,
    pub tokens: Vec<String>,
}

impl Tweet {
    pub fn new(id: impl Into<String>, raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let tokens = tokenize(&raw);
        Tweet {
            id: id.into(),
            raw,
            tokens,
        }
    }

    /// Builds a tweet from tokens that are already preprocessed.
    pub fn from_tokens(id: impl Into<String>, tokens: Vec<String>) -> Self {
        Tweet {
            id: id.into(),
            raw: tokens.join(" "),
            tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Preprocesses raw text into a tweet with an empty id.
pub fn preprocess(raw: &str) -> Tweet {
    Tweet::new(String::new(), raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Anger,
    Fear,
    Joy,
    Sadness,
    Valence,
}

impl Dimension {
    pub const EMOTIONS: [Dimension; 4] = [
        Dimension::Anger,
        Dimension::Fear,
        Dimension::Joy,
        Dimension::Sadness,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Anger => "anger",
            Dimension::Fear => "fear",
            Dimension::Joy => "joy",
            Dimension::Sadness => "sadness",
            Dimension::Valence => "valence",
        }
    }

    pub fn is_emotion(self) -> bool {
        self != Dimension::Valence
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "anger" => Ok(Dimension::Anger),
            "fear" => Ok(Dimension::Fear),
            "joy" => Ok(Dimension::Joy),
            "sadness" => Ok(Dimension::Sadness),
            "valence" => Ok(Dimension::Valence),
            other => Err(Error::InvalidInput(format!("unknown dimension {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Regression,
    Ordinal,
}

/// An affect dimension paired with its task formulation. Emotions form the
/// EI-Reg/EI-Oc subtasks and valence forms V-Reg/V-Oc, so every pairing is
/// a valid subtask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffectTarget {
    pub dimension: Dimension,
    pub task: TaskKind,
}

impl AffectTarget {
    pub fn new(dimension: Dimension, task: TaskKind) -> Self {
        AffectTarget { dimension, task }
    }

    /// All ten subtasks, in the order EI-Reg, EI-Oc, V-Reg, V-Oc.
    pub fn all() -> Vec<AffectTarget> {
        let mut out = Vec::with_capacity(10);
        for task in [TaskKind::Regression, TaskKind::Ordinal] {
            for d in Dimension::EMOTIONS {
                out.push(AffectTarget::new(d, task));
            }
        }
        out.push(AffectTarget::new(Dimension::Valence, TaskKind::Regression));
        out.push(AffectTarget::new(Dimension::Valence, TaskKind::Ordinal));
        out
    }

    /// Shared-task identifier such as `EI-Reg-anger` or `V-Oc`.
    pub fn task_id(&self) -> String {
        let kind = match self.task {
            TaskKind::Regression => "Reg",
            TaskKind::Ordinal => "Oc",
        };
        if self.dimension.is_emotion() {
            format!("EI-{kind}-{}", self.dimension)
        } else {
            format!("V-{kind}")
        }
    }

    /// Ordered class indices for ordinal subtasks.
    pub fn class_range(&self) -> Option<(i32, i32)> {
        match (self.task, self.dimension) {
            (TaskKind::Regression, _) => None,
            (TaskKind::Ordinal, Dimension::Valence) => Some((-3, 3)),
            (TaskKind::Ordinal, _) => Some((0, 3)),
        }
    }

    pub fn n_classes(&self) -> Option<usize> {
        self.class_range().map(|(lo, hi)| (hi - lo + 1) as usize)
    }

    /// Maps a class index onto the [0,1] label scale.
    pub fn normalize_class(&self, class: i32) -> Result<f64> {
        let (lo, hi) = self.class_range().ok_or_else(|| {
            Error::InvalidInput(format!("{} has no ordinal classes", self.task_id()))
        })?;
        if class < lo || class > hi {
            return Err(Error::InvalidInput(format!(
                "class {class} outside {lo}..={hi}"
            )));
        }
        Ok(class_to_unit((class - lo) as usize, (hi - lo + 1) as usize))
    }

    /// Inverse of [`AffectTarget::normalize_class`]: nearest class for a
    /// prediction on the [0,1] scale.
    pub fn decode_class(&self, value: f64) -> Option<i32> {
        let (lo, hi) = self.class_range()?;
        Some(lo + to_ordinal(value, (hi - lo + 1) as usize) as i32)
    }
}

impl fmt::Display for AffectTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.task_id())
    }
}

impl FromStr for AffectTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown task id {s:?}"));
        let parts: Vec<&str> = s.trim().split('-').collect();
        let task = |k: &str| match k.to_ascii_lowercase().as_str() {
            "reg" => Ok(TaskKind::Regression),
            "oc" => Ok(TaskKind::Ordinal),
            _ => Err(bad()),
        };
        match parts.as_slice() {
            [v, k] if v.eq_ignore_ascii_case("v") => {
                Ok(AffectTarget::new(Dimension::Valence, task(k)?))
            }
            [ei, k, d] if ei.eq_ignore_ascii_case("ei") => {
                let dim: Dimension = d.parse().map_err(|_| bad())?;
                if !dim.is_emotion() {
                    return Err(bad());
                }
                Ok(AffectTarget::new(dim, task(k)?))
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Gold,
    Translated,
    Silver,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Gold => "gold",
            Origin::Translated => "translated",
            Origin::Silver => "silver",
        }
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gold" => Ok(Origin::Gold),
            "translated" => Ok(Origin::Translated),
            "silver" => Ok(Origin::Silver),
            other => Err(Error::InvalidInput(format!("unknown origin {other:?}"))),
        }
    }
}

/// A tweet with its intensity label on the [0,1] scale. The affect target
/// lives on the owning [`Dataset`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledInstance {
    pub tweet: Tweet,
    pub label: f64,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    target: AffectTarget,
    instances: Vec<LabeledInstance>,
}

impl Dataset {
    pub fn empty(target: AffectTarget) -> Self {
        Dataset {
            target,
            instances: Vec::new(),
        }
    }

    /// Validates label range, the ordinal grid and id uniqueness per origin.
    pub fn new(target: AffectTarget, instances: Vec<LabeledInstance>) -> Result<Self> {
        let mut ds = Dataset::empty(target);
        ds.instances.reserve(instances.len());
        let mut seen: HashSet<(Origin, String)> = HashSet::new();
        for inst in instances {
            ds.check(&inst)?;
            if !seen.insert((inst.origin, inst.tweet.id.clone())) {
                return Err(Error::InvalidInput(format!(
                    "duplicate {} instance id {:?}",
                    inst.origin.as_str(),
                    inst.tweet.id
                )));
            }
            ds.instances.push(inst);
        }
        Ok(ds)
    }

    fn check(&self, inst: &LabeledInstance) -> Result<()> {
        let label = inst.label;
        if !(0.0..=1.0).contains(&label) {
            return Err(Error::InvalidInput(format!(
                "label {label} of {:?} outside [0,1]",
                inst.tweet.id
            )));
        }
        if let Some(class) = self.target.decode_class(label) {
            if self.target.normalize_class(class)? != label && inst.origin == Origin::Gold {
                return Err(Error::InvalidInput(format!(
                    "ordinal label {label} of {:?} is off the class grid",
                    inst.tweet.id
                )));
            }
        }
        Ok(())
    }

    pub fn target(&self) -> AffectTarget {
        self.target
    }

    pub fn instances(&self) -> &[LabeledInstance] {
        &self.instances
    }

    pub fn into_instances(self) -> Vec<LabeledInstance> {
        self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn labels(&self) -> Vec<f64> {
        self.instances.iter().map(|i| i.label).collect()
    }

    pub fn tweets(&self) -> impl Iterator<Item = &Tweet> {
        self.instances.iter().map(|i| &i.tweet)
    }

    pub fn ids(&self) -> Vec<String> {
        self.instances.iter().map(|i| i.tweet.id.clone()).collect()
    }

    /// Instances selected by position, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            target: self.target,
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
        }
    }
}

/// Loads a dataset TSV (`id<TAB>text<TAB>dimension<TAB>label`, optional
/// fifth `origin` column). Ordinal labels may be written `k: description`.
pub fn load_dataset(path: &Path, target: AffectTarget, header: bool) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, path, target, header)
}

pub fn parse_dataset(text: &str, path: &Path, target: AffectTarget, header: bool) -> Result<Dataset> {
    let mut instances = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if (header && idx == 0) || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 && cols.len() != 5 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 4 tab-separated columns, found {}", cols.len()),
            ));
        }
        let dim: Dimension = cols[2]
            .parse()
            .map_err(|e: Error| Error::parse(path, lineno, e.to_string()))?;
        if dim != target.dimension {
            return Err(Error::parse(
                path,
                lineno,
                format!("dimension {dim} does not match task {target}"),
            ));
        }
        let label = parse_label(cols[3], target).map_err(|m| Error::parse(path, lineno, m))?;
        let origin = match cols.get(4) {
            Some(o) => o
                .parse()
                .map_err(|e: Error| Error::parse(path, lineno, e.to_string()))?,
            None => Origin::Gold,
        };
        instances.push(LabeledInstance {
            tweet: Tweet::new(cols[0], cols[1]),
            label,
            origin,
        });
    }
    Dataset::new(target, instances).map_err(|e| Error::parse(path, 0, e.to_string()))
}

fn parse_label(field: &str, target: AffectTarget) -> std::result::Result<f64, String> {
    match target.class_range() {
        None => {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| format!("label {field:?} is not a number"))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("label {v} outside [0,1]"));
            }
            Ok(v)
        }
        Some(_) => {
            let head = field.split(':').next().unwrap_or("").trim();
            let k: i32 = head
                .parse()
                .map_err(|_| format!("ordinal label {field:?} has no class index"))?;
            target.normalize_class(k).map_err(|e| e.to_string())
        }
    }
}

fn clean_field(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// Writes the dataset in the TSV format read by [`load_dataset`]. Ordinal
/// labels are written as class indices; non-gold rows carry an origin column.
pub fn save_dataset(ds: &Dataset, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    write_dataset(ds, &mut out).map_err(|e| Error::io(path, e))?;
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn write_dataset<W: Write>(ds: &Dataset, w: &mut W) -> std::io::Result<()> {
    let target = ds.target;
    for inst in &ds.instances {
        let label = match target.decode_class(inst.label) {
            Some(k) if target.normalize_class(k).ok() == Some(inst.label) => k.to_string(),
            _ => inst.label.to_string(),
        };
        write!(
            w,
            "{}\t{}\t{}\t{}",
            clean_field(&inst.tweet.id),
            clean_field(&inst.tweet.raw),
            target.dimension,
            label
        )?;
        if inst.origin != Origin::Gold {
            write!(w, "\t{}", inst.origin.as_str())?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Keeps tweets with at least `min_tokens` tokens and drops later exact
/// duplicates of a token sequence. Order is preserved.
pub fn filter_corpus(tweets: &[Tweet], min_tokens: usize) -> Vec<Tweet> {
    let mut seen: HashSet<&[String]> = HashSet::new();
    tweets
        .iter()
        .filter(|t| t.tokens.len() >= min_tokens && seen.insert(t.tokens.as_slice()))
        .cloned()
        .collect()
}

/// Reads unlabeled tweets: one tweet per line, or dataset-style rows whose
/// first two tab-separated columns are id and text.
pub fn load_tweets(path: &Path) -> Result<Vec<Tweet>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let mut cols = line.split('\t');
            match (cols.next(), cols.next()) {
                (Some(id), Some(text)) => Tweet::new(id, text),
                _ => Tweet::new(format!("line-{}", i + 1), line),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ei_oc_anger() -> AffectTarget {
        AffectTarget::new(Dimension::Anger, TaskKind::Ordinal)
    }

    fn reg_anger() -> AffectTarget {
        AffectTarget::new(Dimension::Anger, TaskKind::Regression)
    }

    #[test]
    fn task_ids_round_trip() {
        for t in AffectTarget::all() {
            assert_eq!(t.task_id().parse::<AffectTarget>().unwrap(), t);
        }
        assert_eq!(AffectTarget::all().len(), 10);
        assert!("EI-Reg-valence".parse::<AffectTarget>().is_err());
        assert!("V-Foo".parse::<AffectTarget>().is_err());
    }

    #[test]
    fn regression_label_passthrough() {
        let ds = parse_dataset(
            "1\thola\tanger\t0.479\n",
            Path::new("t.tsv"),
            reg_anger(),
            false,
        )
        .unwrap();
        assert_eq!(ds.instances()[0].label, 0.479);
        assert_eq!(ds.instances()[0].origin, Origin::Gold);
    }

    #[test]
    fn ordinal_label_normalized() {
        let ds = parse_dataset(
            "1\thola\tanger\t2: moderate anger can be inferred\n",
            Path::new("t.tsv"),
            ei_oc_anger(),
            false,
        )
        .unwrap();
        assert!((ds.instances()[0].label - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn valence_ordinal_uses_signed_classes() {
        let t = AffectTarget::new(Dimension::Valence, TaskKind::Ordinal);
        assert_eq!(t.normalize_class(-3).unwrap(), 0.0);
        assert_eq!(t.normalize_class(0).unwrap(), 0.5);
        assert_eq!(t.normalize_class(3).unwrap(), 1.0);
        assert_eq!(t.decode_class(0.5), Some(0));
    }

    #[test]
    fn malformed_row_names_line() {
        let err = parse_dataset(
            "1\ta\tanger\t0.5\n2\tb\tanger\n",
            Path::new("t.tsv"),
            reg_anger(),
            false,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn out_of_range_labels_rejected() {
        let p = Path::new("t.tsv");
        assert!(parse_dataset("1\ta\tanger\t1.5\n", p, reg_anger(), false).is_err());
        assert!(parse_dataset("1\ta\tanger\t4: x\n", p, ei_oc_anger(), false).is_err());
        assert!(parse_dataset("1\ta\tjoy\t0.5\n", p, reg_anger(), false).is_err());
    }

    #[test]
    fn header_is_skipped() {
        let ds = parse_dataset(
            "ID\tTweet\tAffect Dimension\tIntensity Score\n1\ta\tanger\t0.5\n",
            Path::new("t.tsv"),
            reg_anger(),
            true,
        )
        .unwrap();
        assert_eq!(ds.len(), 1);
    }

    #[test]
    fn duplicate_ids_within_origin_rejected() {
        let inst = |origin| LabeledInstance {
            tweet: Tweet::new("a", "x"),
            label: 0.5,
            origin,
        };
        assert!(Dataset::new(reg_anger(), vec![inst(Origin::Gold), inst(Origin::Gold)]).is_err());
        assert!(
            Dataset::new(reg_anger(), vec![inst(Origin::Gold), inst(Origin::Translated)]).is_ok()
        );
    }

    #[test]
    fn filter_corpus_boundaries() {
        let mk = |n: usize, tag: &str| {
            Tweet::from_tokens(tag, (0..n).map(|i| format!("{tag}{i}")).collect())
        };
        let tweets = vec![mk(9, "a"), mk(10, "b"), mk(11, "c")];
        let kept = filter_corpus(&tweets, 10);
        assert_eq!(kept.iter().map(Tweet::len).collect::<Vec<_>>(), vec![10, 11]);
        assert!(filter_corpus(&[], 10).is_empty());
    }

    #[test]
    fn filter_corpus_drops_duplicates() {
        let long = Tweet::from_tokens("x", (0..12).map(|i| i.to_string()).collect());
        let short = Tweet::from_tokens("d1", vec!["a".into(), "b".into()]);
        let mut short2 = short.clone();
        short2.id = "d2".into();
        let kept = filter_corpus(&[short.clone(), short2.clone(), long.clone()], 10);
        assert_eq!(kept, vec![long.clone()]);
        let kept = filter_corpus(&[short, short2, long.clone()], 0);
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[0].id, "d1");
    }
}
