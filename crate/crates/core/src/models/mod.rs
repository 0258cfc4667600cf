//! Predictor specifications, training, prediction, run averaging and
//! cross-validated parameter search.

pub mod feed_forward;
pub mod kernel_svr;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::pearson_or_zero;
use crate::features::FeatureVector;

use feed_forward::{Activation, Mlp, TrainOptions};
use kernel_svr::{SvrModel, SvrParams};

/// Dropout applied after the first hidden layer of every feed-forward net.
pub const FIRST_LAYER_DROPOUT: f64 = 0.001;

/// Seed of the shuffle that assigns cross-validation folds.
pub const FOLD_SEED: u64 = 0x5eed_f01d;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictorKind {
    KernelSvr,
    FeedForward,
    External,
}

impl PredictorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PredictorKind::KernelSvr => "kernel_svr",
            PredictorKind::FeedForward => "feed_forward",
            PredictorKind::External => "external",
        }
    }
}

/// Declarative model configuration. Only the fields of `kind` matter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorSpec {
    pub kind: PredictorKind,
    // kernel_svr
    pub epsilon: f64,
    /// RBF width; `None` means `1 / feature_width`.
    pub gamma: Option<f64>,
    pub cost: f64,
    pub tolerance: f64,
    pub max_passes: usize,
    // feed_forward
    pub layers: Vec<usize>,
    pub first_dropout: f64,
    /// Dropout after every hidden layer past the first.
    pub dropout: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub lr_decay_every: usize,
    // shared
    pub seed: u64,
    /// Standardize features on the training rows before fitting.
    pub standardize: bool,
    // external
    pub predictions: Option<PathBuf>,
}

impl Default for PredictorSpec {
    fn default() -> Self {
        PredictorSpec {
            kind: PredictorKind::KernelSvr,
            epsilon: 0.1,
            gamma: None,
            cost: 1.0,
            tolerance: 1e-4,
            max_passes: 10_000,
            layers: Vec::new(),
            first_dropout: FIRST_LAYER_DROPOUT,
            dropout: 0.0,
            epochs: 100,
            batch_size: 32,
            learning_rate: 1e-3,
            lr_decay: 0.5,
            lr_decay_every: 50,
            seed: 0,
            standardize: true,
            predictions: None,
        }
    }
}

impl PredictorSpec {
    pub fn kernel_svr(epsilon: f64) -> Self {
        PredictorSpec {
            kind: PredictorKind::KernelSvr,
            epsilon,
            ..Default::default()
        }
    }

    pub fn feed_forward(layers: Vec<usize>) -> Self {
        PredictorSpec {
            kind: PredictorKind::FeedForward,
            layers,
            ..Default::default()
        }
    }

    pub fn external(predictions: impl Into<PathBuf>) -> Self {
        PredictorSpec {
            kind: PredictorKind::External,
            predictions: Some(predictions.into()),
            standardize: false,
            ..Default::default()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        PredictorSpec {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(format!("{}: {m}", self.label())));
        match self.kind {
            PredictorKind::KernelSvr => {
                if !(self.epsilon > 0.0) {
                    return bad("epsilon must be positive");
                }
                if !(self.cost > 0.0) {
                    return bad("cost must be positive");
                }
                if self.gamma.is_some_and(|g| !(g > 0.0)) {
                    return bad("gamma must be positive");
                }
                if !(self.tolerance > 0.0) || self.max_passes == 0 {
                    return bad("solver limits must be positive");
                }
            }
            PredictorKind::FeedForward => {
                if self.layers.is_empty() || self.layers.contains(&0) {
                    return bad("layers must be a nonempty list of positive sizes");
                }
                for p in [self.first_dropout, self.dropout] {
                    if !(0.0..1.0).contains(&p) {
                        return bad("dropout must lie in [0,1)");
                    }
                }
                if self.epochs == 0 || self.batch_size == 0 || !(self.learning_rate > 0.0) {
                    return bad("epochs, batch size and learning rate must be positive");
                }
                if !(self.lr_decay > 0.0) || self.lr_decay_every == 0 {
                    return bad("learning-rate decay must be positive");
                }
            }
            PredictorKind::External => {
                if self.predictions.is_none() {
                    return bad("external predictor needs a predictions file");
                }
            }
        }
        Ok(())
    }

    /// Short human-readable description.
    pub fn label(&self) -> String {
        match self.kind {
            PredictorKind::KernelSvr => {
                let mut s = format!("svm(epsilon={}, cost={}", self.epsilon, self.cost);
                if let Some(g) = self.gamma {
                    let _ = write!(s, ", gamma={g}");
                }
                s.push(')');
                s
            }
            PredictorKind::FeedForward => format!(
                "ff(layers={}, dropout={}/{})",
                join_usize(&self.layers),
                self.first_dropout,
                self.dropout
            ),
            PredictorKind::External => format!(
                "external({})",
                self.predictions
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default()
            ),
        }
    }

    /// `key = value` lines under `prefix`, readable by [`PredictorSpec::from_pairs`].
    pub fn to_config(&self, prefix: &str) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{prefix}.{k} = {v}");
        };
        kv("kind", self.kind.as_str().into());
        match self.kind {
            PredictorKind::KernelSvr => {
                kv("epsilon", self.epsilon.to_string());
                kv("cost", self.cost.to_string());
                if let Some(g) = self.gamma {
                    kv("gamma", g.to_string());
                }
                kv("tolerance", self.tolerance.to_string());
                kv("max_passes", self.max_passes.to_string());
            }
            PredictorKind::FeedForward => {
                kv("layers", join_usize(&self.layers));
                kv("first_dropout", self.first_dropout.to_string());
                kv("dropout", self.dropout.to_string());
                kv("epochs", self.epochs.to_string());
                kv("batch_size", self.batch_size.to_string());
                kv("learning_rate", self.learning_rate.to_string());
                kv("lr_decay", self.lr_decay.to_string());
                kv("lr_decay_every", self.lr_decay_every.to_string());
            }
            PredictorKind::External => {
                if let Some(p) = &self.predictions {
                    kv("predictions", p.display().to_string());
                }
            }
        }
        kv("seed", self.seed.to_string());
        kv("standardize", self.standardize.to_string());
        out
    }

    /// Applies `key = value` overrides (keys without prefix) onto `self`.
    pub fn apply_pairs<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<()> {
        for (k, v) in pairs {
            let bad = || Error::Config(format!("bad value {v:?} for model key {k:?}"));
            let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
            let int = |v: &str| v.trim().parse::<usize>().map_err(|_| bad());
            match k {
                "kind" => {
                    self.kind = match v.trim() {
                        "kernel_svr" | "svm" => PredictorKind::KernelSvr,
                        "feed_forward" | "ff" => PredictorKind::FeedForward,
                        "external" => PredictorKind::External,
                        _ => return Err(bad()),
                    }
                }
                "epsilon" => self.epsilon = num(v)?,
                "cost" => self.cost = num(v)?,
                "gamma" => self.gamma = Some(num(v)?),
                "tolerance" => self.tolerance = num(v)?,
                "max_passes" => self.max_passes = int(v)?,
                "layers" => self.layers = parse_usize_list(v).ok_or_else(bad)?,
                "first_dropout" => self.first_dropout = num(v)?,
                "dropout" => self.dropout = num(v)?,
                "epochs" => self.epochs = int(v)?,
                "batch_size" => self.batch_size = int(v)?,
                "learning_rate" => self.learning_rate = num(v)?,
                "lr_decay" => self.lr_decay = num(v)?,
                "lr_decay_every" => self.lr_decay_every = int(v)?,
                "seed" => self.seed = v.trim().parse().map_err(|_| bad())?,
                "standardize" => self.standardize = v.trim().parse().map_err(|_| bad())?,
                "predictions" => self.predictions = Some(PathBuf::from(v.trim())),
                _ => return Err(Error::Config(format!("unknown model key {k:?}"))),
            }
        }
        Ok(())
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut spec = PredictorSpec::default();
        spec.apply_pairs(pairs)?;
        spec.validate()?;
        Ok(spec)
    }

    fn svr_params(&self, width: usize) -> SvrParams {
        SvrParams {
            epsilon: self.epsilon,
            cost: self.cost,
            gamma: self.gamma.unwrap_or(1.0 / width.max(1) as f64),
            tolerance: self.tolerance,
            max_passes: self.max_passes,
        }
    }

    fn train_options(&self) -> TrainOptions {
        TrainOptions {
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            decay: self.lr_decay,
            decay_every: self.lr_decay_every,
        }
    }

    fn dropout_schedule(&self) -> Vec<f64> {
        (0..self.layers.len())
            .map(|l| if l == 0 { self.first_dropout } else { self.dropout })
            .collect()
    }

    /// A freshly initialized network for this spec.
    pub fn init_network(&self, width: usize, with_dropout: bool) -> Mlp {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let dropout = if with_dropout {
            self.dropout_schedule()
        } else {
            vec![]
        };
        Mlp::new(
            width,
            &self.layers,
            Activation::Relu,
            Activation::Sigmoid,
            dropout,
            &mut rng,
        )
    }
}

pub fn join_usize(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_usize_list(s: &str) -> Option<Vec<usize>> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    s.split(',').map(|p| p.trim().parse().ok()).collect()
}

/// Per-column affine scaling to zero mean and unit variance. Constant
/// columns are only centered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[&[f64]]) -> Self {
        let width = rows.first().map_or(0, |r| r.len());
        let n = rows.len().max(1) as f64;
        let mut mean = vec![0.0; width];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r.iter()) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; width];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r.iter()).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FittedState {
    KernelSvr(SvrModel),
    FeedForward(Mlp),
    External(HashMap<String, f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedPredictor {
    pub spec: PredictorSpec,
    pub feature_width: usize,
    pub scaler: Option<Standardizer>,
    pub state: FittedState,
    /// Solver objective (kernel_svr) or epoch losses (feed_forward).
    pub trace: Vec<f64>,
    /// Set when training stopped at its budget instead of converging.
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub ids: Vec<String>,
    pub values: Vec<f64>,
}

impl PredictionSet {
    pub fn new(ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if ids.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} ids but {} values",
                ids.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite prediction".into()));
        }
        Ok(PredictionSet { ids, values })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (id, v) in self.ids.iter().zip(&self.values) {
            let _ = writeln!(out, "{id}\t{v}");
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut ids = Vec::new();
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(id), Some(v), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::parse(path, i + 1, "expected id<TAB>value"));
            };
            let v: f64 = v
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::parse(path, i + 1, format!("bad value {v:?}")))?;
            ids.push(id.to_string());
            values.push(v);
        }
        PredictionSet::new(ids, values)
    }
}

fn check_inputs(x: &[FeatureVector], y: &[f64]) -> Result<usize> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "need matching nonempty inputs, got {} rows and {} labels",
            x.len(),
            y.len()
        )));
    }
    let width = x[0].width();
    for row in x {
        if row.width() != width {
            return Err(Error::WidthMismatch {
                expected: width,
                actual: row.width(),
            });
        }
        if !row.is_finite() {
            return Err(Error::InvalidInput("NaN or infinite feature value".into()));
        }
    }
    for &v in y {
        if !v.is_finite() {
            return Err(Error::InvalidInput("NaN or infinite label".into()));
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidInput(format!("label {v} outside [0,1]")));
        }
    }
    Ok(width)
}

/// Fits `spec` on rows `x` with labels `y` in [0,1].
pub fn train(spec: &PredictorSpec, x: &[FeatureVector], y: &[f64]) -> Result<TrainedPredictor> {
    spec.validate()?;
    if spec.kind == PredictorKind::External {
        let path = spec.predictions.as_ref().expect("validated");
        let set = PredictionSet::load(path)?;
        return Ok(TrainedPredictor {
            spec: spec.clone(),
            feature_width: x.first().map_or(0, |r| r.width()),
            scaler: None,
            state: FittedState::External(set.ids.into_iter().zip(set.values).collect()),
            trace: Vec::new(),
            warning: None,
        });
    }
    let width = check_inputs(x, y)?;
    let rows: Vec<&[f64]> = x.iter().map(|r| r.values.as_slice()).collect();
    let scaler = spec.standardize.then(|| Standardizer::fit(&rows));
    let scaled: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| match &scaler {
            Some(s) => s.apply(r),
            None => r.to_vec(),
        })
        .collect();

    let (state, trace, warning) = match spec.kind {
        PredictorKind::KernelSvr => {
            let fit = kernel_svr::fit(&scaled, y, &spec.svr_params(width));
            let warning = (!fit.converged).then(|| {
                format!(
                    "kernel solver stopped after {} updates with KKT violation {:.3e}",
                    fit.iterations, fit.max_violation
                )
            });
            (FittedState::KernelSvr(fit.model), fit.objective_trace, warning)
        }
        PredictorKind::FeedForward => {
            let xm = to_matrix(&scaled, width);
            let mut net = spec.init_network(width, true);
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(0x9e37_79b9));
            let outcome = feed_forward::train(&mut net, xm.view(), y, &spec.train_options(), &mut rng);
            let warning = (outcome.best_epoch == 0)
                .then(|| "training loss never improved on the initial network".to_string());
            (FittedState::FeedForward(net), outcome.loss_trace, warning)
        }
        PredictorKind::External => unreachable!(),
    };
    Ok(TrainedPredictor {
        spec: spec.clone(),
        feature_width: width,
        scaler,
        state,
        trace,
        warning,
    })
}

fn to_matrix(rows: &[Vec<f64>], width: usize) -> Array2<f64> {
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((rows.len(), width), flat).expect("uniform rows")
}

impl TrainedPredictor {
    /// Predictions for `x`, labelled with `ids`. Kernel outputs are clipped
    /// to [0,1]; network outputs already lie in (0,1).
    pub fn predict(&self, ids: &[String], x: &[FeatureVector]) -> Result<PredictionSet> {
        if ids.len() != x.len() {
            return Err(Error::InvalidInput(format!(
                "{} ids for {} rows",
                ids.len(),
                x.len()
            )));
        }
        if let FittedState::External(map) = &self.state {
            let values = ids
                .iter()
                .map(|id| {
                    map.get(id).copied().ok_or_else(|| {
                        Error::InvalidInput(format!("no external prediction for id {id:?}"))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            return PredictionSet::new(ids.to_vec(), values);
        }
        for row in x {
            if row.width() != self.feature_width {
                return Err(Error::WidthMismatch {
                    expected: self.feature_width,
                    actual: row.width(),
                });
            }
        }
        let scaled: Vec<Vec<f64>> = x
            .iter()
            .map(|r| match &self.scaler {
                Some(s) => s.apply(&r.values),
                None => r.values.clone(),
            })
            .collect();
        let values = match &self.state {
            FittedState::KernelSvr(m) => scaled
                .iter()
                .map(|r| m.predict_one(r).clamp(0.0, 1.0))
                .collect(),
            FittedState::FeedForward(net) => {
                if scaled.is_empty() {
                    Vec::new()
                } else {
                    net.predict(to_matrix(&scaled, self.feature_width).view()).to_vec()
                }
            }
            FittedState::External(_) => unreachable!(),
        };
        PredictionSet::new(ids.to_vec(), values)
    }
}

/// Free-function form of [`TrainedPredictor::predict`].
pub fn predict(model: &TrainedPredictor, ids: &[String], x: &[FeatureVector]) -> Result<PredictionSet> {
    model.predict(ids, x)
}

/// Element-wise mean of `runs` train+predict cycles with seeds
/// `seed_base .. seed_base + runs`. Runs execute in parallel and are
/// reduced in seed order.
pub fn average_runs(
    spec: &PredictorSpec,
    x_train: &[FeatureVector],
    y_train: &[f64],
    eval_ids: &[String],
    x_eval: &[FeatureVector],
    runs: usize,
    seed_base: u64,
) -> Result<PredictionSet> {
    if runs == 0 {
        return Err(Error::InvalidInput("runs must be at least 1".into()));
    }
    let sets: Vec<PredictionSet> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let s = spec.with_seed(seed_base + r as u64);
            train(&s, x_train, y_train)
                .and_then(|m| m.predict(eval_ids, x_eval))
                .map_err(|e| Error::training(format!("run {r} of {}", spec.label()), e))
        })
        .collect::<Result<_>>()?;
    mean_sets(&sets)
}

/// Element-wise mean of aligned prediction sets, summed in order.
pub fn mean_sets(sets: &[PredictionSet]) -> Result<PredictionSet> {
    let first = sets
        .first()
        .ok_or_else(|| Error::InvalidInput("nothing to average".into()))?;
    let mut acc = vec![0.0; first.len()];
    for s in sets {
        if s.ids != first.ids {
            return Err(Error::InvalidInput("prediction ids are not aligned".into()));
        }
        for (a, v) in acc.iter_mut().zip(&s.values) {
            *a += v;
        }
    }
    let n = sets.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    PredictionSet::new(first.ids.clone(), acc)
}

/// Fold index of every row: a seeded shuffle dealt round-robin.
pub fn fold_assignment(n: usize, folds: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(FOLD_SEED));
    let mut fold = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        fold[row] = pos % folds;
    }
    fold
}

/// Mean out-of-fold Pearson of `spec`; a fold whose predictions are
/// constant scores 0.
pub fn cross_val_score(spec: &PredictorSpec, x: &[FeatureVector], y: &[f64], folds: usize) -> Result<f64> {
    if folds < 2 {
        return Err(Error::InvalidInput("cross-validation needs at least 2 folds".into()));
    }
    if x.len() < folds || x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "cross-validation needs at least {folds} rows, got {}",
            x.len()
        )));
    }
    let assign = fold_assignment(x.len(), folds);
    let scores: Vec<f64> = (0..folds)
        .into_par_iter()
        .map(|f| {
            let (mut xt, mut yt, mut xv, mut yv) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for (i, &a) in assign.iter().enumerate() {
                if a == f {
                    xv.push(x[i].clone());
                    yv.push(y[i]);
                } else {
                    xt.push(x[i].clone());
                    yt.push(y[i]);
                }
            }
            let model = train(spec, &xt, &yt)?;
            let ids: Vec<String> = (0..xv.len()).map(|i| i.to_string()).collect();
            let pred = model.predict(&ids, &xv)?;
            if yv.len() < 2 {
                return Ok(0.0);
            }
            pearson_or_zero(&pred.values, &yv)
        })
        .collect::<Result<_>>()?;
    Ok(scores.iter().sum::<f64>() / folds as f64)
}

/// Scores every spec by [`cross_val_score`] and returns the best (first on
/// ties) with the full table.
pub fn grid_search(
    specs: &[PredictorSpec],
    x: &[FeatureVector],
    y: &[f64],
    folds: usize,
) -> Result<(PredictorSpec, Vec<(PredictorSpec, f64)>)> {
    if specs.is_empty() {
        return Err(Error::InvalidInput("no specs to search".into()));
    }
    let mut table = Vec::with_capacity(specs.len());
    for spec in specs {
        let score = cross_val_score(spec, x, y, folds)
            .map_err(|e| Error::training(spec.label(), e))?;
        table.push((spec.clone(), score));
    }
    let best = table
        .iter()
        .fold(None::<&(PredictorSpec, f64)>, |best, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        })
        .expect("nonempty")
        .0
        .clone();
    Ok((best, table))
}

/// Kernel epsilon grid spanning the range used across the shipped task
/// defaults.
pub fn epsilon_grid() -> Vec<f64> {
    vec![0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09]
}

/// Maximal relative error between backpropagated and central-difference
/// gradients (step `1e-5`) of a freshly initialized network for `spec` on
/// one example. Dropout is disabled.
pub fn finite_difference_check(spec: &PredictorSpec, x: &FeatureVector, y: f64) -> Result<f64> {
    if spec.kind != PredictorKind::FeedForward {
        return Err(Error::InvalidInput("gradient check needs a feed_forward spec".into()));
    }
    spec.validate()?;
    let net = spec.init_network(x.width(), false);
    Ok(feed_forward::gradient_check(&net, &x.values, y, 1e-5))
}
