use std::fmt;

use serde::{Deserialize, Serialize};

use super::{IndexError, IndicatorVector};

/// Share of indicators that were actually observed for a country.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageWeight {
    pub g: f64,
    pub n_missing: usize,
}

/// Coverage of a vector's *original* mask: `(N - n_missing) / N`.
///
/// An empty vector has no coverage (`g = 0`).
pub fn coverage(v: &IndicatorVector) -> CoverageWeight {
    let n = v.len();
    let n_missing = v.n_missing();
    let g = if n == 0 {
        0.0
    } else {
        (n - n_missing) as f64 / n as f64
    };
    CoverageWeight { g, n_missing }
}

/// How coverage is turned into the multiplier applied to the similarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase")]
pub enum WeightingScheme {
    Linear,
    Sigmoid { gamma: f64 },
}

impl WeightingScheme {
    /// Sigmoid weighting centred at `gamma`, which must lie strictly inside `(0, 1)`.
    pub fn sigmoid(gamma: f64) -> Result<Self, IndexError> {
        if gamma > 0.0 && gamma < 1.0 {
            Ok(WeightingScheme::Sigmoid { gamma })
        } else {
            Err(IndexError::InvalidParameter(format!(
                "gamma must lie strictly between 0 and 1, got {gamma}"
            )))
        }
    }

    /// Builds a scheme from its textual name. `gamma` is only consulted (and
    /// validated) for the sigmoid scheme.
    pub fn from_name(name: &str, gamma: f64) -> Result<Self, IndexError> {
        match name.to_ascii_lowercase().as_str() {
            "linear" => Ok(WeightingScheme::Linear),
            "sigmoid" => Self::sigmoid(gamma),
            other => Err(IndexError::InvalidParameter(format!(
                "unknown scheme '{other}' (expected linear|sigmoid)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightingScheme::Linear => "linear",
            WeightingScheme::Sigmoid { .. } => "sigmoid",
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            WeightingScheme::Linear => None,
            WeightingScheme::Sigmoid { gamma } => Some(gamma),
        }
    }

    pub fn apply(&self, g: f64) -> f64 {
        match *self {
            WeightingScheme::Linear => g,
            WeightingScheme::Sigmoid { gamma } => sigmoid_weight(g, gamma),
        }
    }
}

impl fmt::Display for WeightingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightingScheme::Linear => f.write_str("linear"),
            WeightingScheme::Sigmoid { gamma } => write!(f, "sigmoid(gamma={gamma})"),
        }
    }
}

// (1 + (g(1-γ) / (γ(1-g)))^-2)^-1, extended by its limits at g = 0 and g = 1.
fn sigmoid_weight(g: f64, gamma: f64) -> f64 {
    if g <= 0.0 {
        return 0.0;
    }
    if g >= 1.0 {
        return 1.0;
    }
    let ratio = (g * (1.0 - gamma)) / (gamma * (1.0 - g));
    let inv = 1.0 / ratio;
    1.0 / (1.0 + inv * inv)
}

pub fn weight(coverage: CoverageWeight, scheme: WeightingScheme) -> f64 {
    scheme.apply(coverage.g)
}
