use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::IndexError;

/// Similarity used to pick imputation donors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Cosine,
    Euclidean,
}

impl Metric {
    pub fn similarity(self, a: &[f64], b: &[f64]) -> Result<f64, IndexError> {
        match self {
            Metric::Cosine => cosine_similarity(a, b),
            Metric::Euclidean => euclidean_similarity(a, b),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Cosine => "cosine",
            Metric::Euclidean => "euclidean",
        })
    }
}

impl FromStr for Metric {
    type Err = IndexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cosine" => Ok(Metric::Cosine),
            "euclidean" => Ok(Metric::Euclidean),
            other => Err(IndexError::InvalidParameter(format!(
                "unknown metric '{other}' (expected cosine|euclidean)"
            ))),
        }
    }
}

fn check_len(a: &[f64], b: &[f64]) -> Result<(), IndexError> {
    if a.len() != b.len() {
        return Err(IndexError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Cosine of the angle between `a` and `b`.
///
/// A zero-norm operand yields `0.0`. For non-negative inputs the result is
/// clamped to `[0, 1]` to absorb rounding just above one.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64, IndexError> {
    check_len(a, b)?;
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(0.0, 1.0))
}

/// `1 / (1 + ‖a − b‖₂)`: equals 1 for identical vectors, decreasing with distance.
pub fn euclidean_similarity(a: &[f64], b: &[f64]) -> Result<f64, IndexError> {
    check_len(a, b)?;
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(1.0 / (1.0 + d2.sqrt()))
}
