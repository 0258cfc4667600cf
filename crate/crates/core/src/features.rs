//! Dense feature vectors with block provenance, and the recipe that builds
//! them for a tweet.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::Tweet;
use crate::embeddings::{embed_tweet, EmbeddingTable};
use crate::error::{Error, Result};
use crate::lexicons::{featurize, Lexicon};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    /// `(block name, width)` segments in order; widths sum to `values.len()`.
    pub layout: Vec<(String, usize)>,
}

impl FeatureVector {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        let width = values.len();
        FeatureVector {
            values,
            layout: vec![(name.into(), width)],
        }
    }

    pub fn empty() -> Self {
        FeatureVector {
            values: Vec::new(),
            layout: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.values.len()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn append(&mut self, other: FeatureVector) {
        self.values.extend(other.values);
        self.layout.extend(other.layout);
    }
}

/// Concatenates values and layouts in order.
pub fn concat_features(blocks: Vec<FeatureVector>) -> Result<FeatureVector> {
    if blocks.is_empty() {
        return Err(Error::InvalidInput("no feature blocks to concatenate".into()));
    }
    let mut out = FeatureVector::empty();
    for b in blocks {
        out.append(b);
    }
    Ok(out)
}

/// Which resources turn a tweet into features: an optional embedding table
/// followed by lexicon blocks in order.
#[derive(Debug, Clone, Default)]
pub struct FeatureSpec {
    pub embeddings: Option<Arc<EmbeddingTable>>,
    pub lexicons: Vec<Arc<Lexicon>>,
}

impl FeatureSpec {
    pub fn new(embeddings: Option<Arc<EmbeddingTable>>, lexicons: Vec<Arc<Lexicon>>) -> Self {
        FeatureSpec {
            embeddings,
            lexicons,
        }
    }

    pub fn with_lexicon(&self, lexicon: Arc<Lexicon>) -> Self {
        let mut spec = self.clone();
        spec.lexicons.push(lexicon);
        spec
    }

    pub fn width(&self) -> usize {
        self.embeddings.as_ref().map_or(0, |e| e.dim())
            + self.lexicons.iter().map(|l| l.feature_width()).sum::<usize>()
    }

    pub fn featurize(&self, tweet: &Tweet) -> FeatureVector {
        let mut out = FeatureVector::empty();
        if let Some(table) = &self.embeddings {
            out.append(FeatureVector::new("embedding", embed_tweet(tweet, table)));
        }
        if !self.lexicons.is_empty() {
            let lexicons: Vec<&Lexicon> = self.lexicons.iter().map(|l| l.as_ref()).collect();
            out.append(featurize(tweet, &lexicons));
        }
        out
    }

    pub fn featurize_all<'a>(&self, tweets: impl IntoIterator<Item = &'a Tweet>) -> Vec<FeatureVector> {
        tweets.into_iter().map(|t| self.featurize(t)).collect()
    }
}
