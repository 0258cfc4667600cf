//! Affect intensity regression for tweets.
//!
//! The pipeline turns tweets into lexicon and embedding features, fits
//! kernel or feed-forward regressors, grows the training data by
//! translation and by agreement-filtered self-training, and combines
//! models by averaging with stepwise pruning.

pub mod augment;
pub mod config;
pub mod corpus;
pub mod embeddings;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod features;
pub mod lexicons;
pub mod models;
pub mod semisup;
pub mod synthetic;

pub use error::{Error, Result};
