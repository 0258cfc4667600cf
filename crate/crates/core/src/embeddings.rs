//! Pretrained word-embedding tables and mean-pooled tweet vectors.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::corpus::Tweet;
use crate::error::{Error, Result};

/// Training settings of the embeddings the pipeline was designed around
/// (CBOW, window 40, minimum count 5). Kept as metadata; the loader accepts
/// any table in the text format.
pub const REFERENCE_TRAINING: &str = "word2vec cbow window=40 min_count=5";

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    index: HashMap<String, usize>,
    words: Vec<String>,
    data: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("embedding dimension must be positive".into()));
        }
        Ok(EmbeddingTable {
            dim,
            index: HashMap::new(),
            words: Vec::new(),
            data: Vec::new(),
        })
    }

    /// Inserts or replaces a vector.
    pub fn insert(&mut self, word: impl Into<String>, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::WidthMismatch {
                expected: self.dim,
                actual: vector.len(),
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite embedding component".into()));
        }
        let word = word.into();
        match self.index.get(&word) {
            Some(&i) => self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(vector),
            None => {
                self.index.insert(word.clone(), self.words.len());
                self.words.push(word);
                self.data.extend_from_slice(vector);
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Canonical text form: `word v1 ... vdim` per row in insertion order,
    /// components in shortest round-trip notation.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, w) in self.words.iter().enumerate() {
            out.push_str(w);
            for v in &self.data[i * self.dim..(i + 1) * self.dim] {
                let _ = write!(out, " {v:?}");
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Loads a text-format embedding table. A first line made of exactly two
/// integers is treated as a `count dim` header. With `vocab`, rows for other
/// words are skipped (their width is still checked).
pub fn load_embeddings(path: &Path, vocab: Option<&HashSet<String>>) -> Result<EmbeddingTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_embeddings(&text, path, vocab)
}

pub fn parse_embeddings(
    text: &str,
    path: &Path,
    vocab: Option<&HashSet<String>>,
) -> Result<EmbeddingTable> {
    let mut table: Option<EmbeddingTable> = None;
    let mut rows = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(' ').filter(|f| !f.is_empty()).collect();
        if rows == 0
            && table.is_none()
            && fields.len() == 2
            && fields.iter().all(|f| f.parse::<u64>().is_ok())
        {
            continue;
        }
        if fields.len() < 2 {
            return Err(Error::parse(path, lineno, "row has no vector components"));
        }
        let width = fields.len() - 1;
        let t = match &mut table {
            Some(t) => t,
            None => table.insert(EmbeddingTable::new(width)?),
        };
        if width != t.dim {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {} components, found {width}", t.dim),
            ));
        }
        rows += 1;
        let word = fields[0];
        if vocab.is_some_and(|v| !v.contains(word)) {
            continue;
        }
        let vector = fields[1..]
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(path, lineno, format!("bad component {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        t.insert(word, &vector)?;
    }
    match table {
        Some(t) if rows > 0 => Ok(t),
        _ => Err(Error::parse(path, 0, "embedding file has no rows")),
    }
}

/// Mean of the vectors of in-vocabulary tokens; zeros when none is known.
pub fn embed_tweet(tweet: &Tweet, table: &EmbeddingTable) -> Vec<f64> {
    let mut acc = vec![0.0; table.dim()];
    let mut hits = 0usize;
    for tok in &tweet.tokens {
        if let Some(v) = table.get(tok) {
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x;
            }
            hits += 1;
        }
    }
    if hits > 0 {
        let n = hits as f64;
        acc.iter_mut().for_each(|a| *a /= n);
    }
    acc
}
