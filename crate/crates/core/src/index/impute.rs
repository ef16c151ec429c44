//! Nearest-donor estimation of missing indicators.
//!
//! A missing indicator of a country is replaced by the mean of that indicator
//! over the country's most similar *complete* countries (its donors). Donors
//! are drawn from the complete rows of the input only, so imputed rows never
//! feed later estimates and the result does not depend on row order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Entity, IndexError, IndicatorVector, Metric};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImputationConfig {
    neighbors: usize,
    pub metric: Metric,
}

impl ImputationConfig {
    pub fn new(neighbors: usize, metric: Metric) -> Result<Self, IndexError> {
        if neighbors == 0 {
            return Err(IndexError::InvalidParameter(
                "neighbors must be at least 1".into(),
            ));
        }
        Ok(Self { neighbors, metric })
    }

    pub fn neighbors(&self) -> usize {
        self.neighbors
    }
}

impl Default for ImputationConfig {
    fn default() -> Self {
        Self {
            neighbors: 10,
            metric: Metric::Cosine,
        }
    }
}

/// A row after imputation: dense values plus the mask it arrived with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputedEntity {
    pub name: String,
    pub values: Vec<f64>,
    pub original: IndicatorVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ImputeWarning {
    /// No complete row existed; column means over observed cells were used.
    NoDonors,
    /// Nobody observed this indicator; the cell was set to zero.
    EmptyIndicator { index: usize },
    /// The row has no observed cell to compare with donors; it stays all zero.
    NoEvidence { name: String },
}

impl fmt::Display for ImputeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImputeWarning::NoDonors => f.write_str("no complete country; imputed with column means"),
            ImputeWarning::EmptyIndicator { index } => {
                write!(f, "indicator {index} is missing everywhere; imputed as 0")
            }
            ImputeWarning::NoEvidence { name } => {
                write!(f, "'{name}' has no observed indicator; left at 0")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Imputation {
    pub entities: Vec<ImputedEntity>,
    pub warnings: Vec<ImputeWarning>,
}

/// Rows with every indicator present, as `(name, dense values)`.
pub fn complete_pool(dataset: &[Entity]) -> Vec<(&str, Vec<f64>)> {
    dataset
        .iter()
        .filter(|e| e.values.is_complete())
        .map(|e| (e.name.as_str(), e.values.zero_fill()))
        .collect()
}

/// The `k` pool members most similar to the zero-filled `target`, most
/// similar first; equal similarities are ordered by name.
pub fn select_donors<'a, N: AsRef<str>>(
    target: &IndicatorVector,
    pool: &'a [(N, Vec<f64>)],
    k: usize,
    metric: Metric,
) -> Result<Vec<&'a str>, IndexError> {
    Ok(rank_donors(target, pool, k, metric)?
        .into_iter()
        .map(|i| pool[i].0.as_ref())
        .collect())
}

fn rank_donors<N: AsRef<str>>(
    target: &IndicatorVector,
    pool: &[(N, Vec<f64>)],
    k: usize,
    metric: Metric,
) -> Result<Vec<usize>, IndexError> {
    if pool.is_empty() {
        return Err(IndexError::NoDonors);
    }
    let probe = target.zero_fill();
    let mut scored = pool
        .iter()
        .enumerate()
        .map(|(i, (_, v))| Ok((i, metric.similarity(&probe, v)?)))
        .collect::<Result<Vec<_>, IndexError>>()?;
    scored.sort_by(|(i, a), (j, b)| {
        b.partial_cmp(a)
            .unwrap_or(Ordering::Equal)
            .then_with(|| pool[*i].0.as_ref().cmp(pool[*j].0.as_ref()))
    });
    scored.truncate(k);
    Ok(scored.into_iter().map(|(i, _)| i).collect())
}

pub fn impute(dataset: &[Entity], cfg: &ImputationConfig) -> Result<Imputation, IndexError> {
    let width = dataset.first().map_or(0, |e| e.values.len());
    if let Some(bad) = dataset.iter().find(|e| e.values.len() != width) {
        return Err(IndexError::LengthMismatch {
            left: width,
            right: bad.values.len(),
        });
    }

    let pool = complete_pool(dataset);
    let mut warnings = Vec::new();

    // Used only when no complete row exists.
    let mut fallback: Option<Vec<f64>> = None;
    if pool.is_empty() && dataset.iter().any(|e| !e.values.is_complete()) {
        warnings.push(ImputeWarning::NoDonors);
        let means = (0..width)
            .map(|k| {
                let observed: Vec<f64> = dataset.iter().filter_map(|e| e.values.get(k)).collect();
                if observed.is_empty() {
                    warnings.push(ImputeWarning::EmptyIndicator { index: k });
                    0.0
                } else {
                    observed.iter().sum::<f64>() / observed.len() as f64
                }
            })
            .collect();
        fallback = Some(means);
    }

    let mut entities = Vec::with_capacity(dataset.len());
    for e in dataset {
        let mut values = e.values.zero_fill();
        if e.values.n_missing() == e.values.len() && width > 0 {
            warnings.push(ImputeWarning::NoEvidence {
                name: e.name.clone(),
            });
        } else if !e.values.is_complete() {
            match &fallback {
                Some(means) => {
                    for (k, cell) in e.values.cells().iter().enumerate() {
                        if cell.is_none() {
                            values[k] = means[k];
                        }
                    }
                }
                None => {
                    let donors = rank_donors(&e.values, &pool, cfg.neighbors, cfg.metric)?;
                    let n = donors.len() as f64;
                    for (k, cell) in e.values.cells().iter().enumerate() {
                        if cell.is_none() {
                            values[k] = donors.iter().map(|&d| pool[d].1[k]).sum::<f64>() / n;
                        }
                    }
                }
            }
        }
        entities.push(ImputedEntity {
            name: e.name.clone(),
            values,
            original: e.values.clone(),
        });
    }

    Ok(Imputation { entities, warnings })
}
