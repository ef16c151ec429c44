//! Blockchain readiness index engine.
//!
//! Indicators are ingested from CSV, min-max normalized, gaps filled from the
//! most similar fully observed countries, and each country is scored by its
//! cosine similarity to an ideal country, discounted by how much of its data
//! was actually observed. The `eval` module measures how well the resulting
//! features separate expert readiness labels.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eval;
pub mod index;
pub mod ingest;
pub mod synth;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Index(#[from] index::IndexError),
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
    #[error(transparent)]
    Synth(#[from] synth::SynthError),
}
