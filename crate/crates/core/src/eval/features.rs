use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{EvalError, LabelSet, LabeledPoint};
use crate::index::{rank, Entity, ImputationConfig, ScoredCountry, WeightingScheme};

/// Which feature construction produced a set of points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    /// Coverage weight and weighted score.
    Proposed,
    /// Weight forced to 1, score equal to the raw similarity.
    Unweighted,
}

fn scored_by_name(
    dataset: &[Entity],
    scheme: WeightingScheme,
    cfg: &ImputationConfig,
) -> Result<HashMap<String, ScoredCountry>, EvalError> {
    Ok(rank(dataset, scheme, cfg)?
        .into_iter()
        .map(|s| (s.name.clone(), s))
        .collect())
}

fn build(
    dataset: &[Entity],
    labels: &LabelSet,
    scheme: WeightingScheme,
    cfg: &ImputationConfig,
    features: impl Fn(&ScoredCountry) -> [f64; 2],
) -> Result<Vec<LabeledPoint>, EvalError> {
    let scored = scored_by_name(dataset, scheme, cfg)?;
    labels
        .iter()
        .map(|(name, label)| {
            let s = scored
                .get(name)
                .ok_or_else(|| EvalError::UnknownCountry(name.clone()))?;
            Ok(LabeledPoint {
                name: name.clone(),
                features: features(s),
                label: *label,
            })
        })
        .collect()
}

/// One point per labeled country, in label-file order, with features
/// `(weight, score)` from the ranking pipeline.
pub fn featurize(
    dataset: &[Entity],
    labels: &LabelSet,
    scheme: WeightingScheme,
    cfg: &ImputationConfig,
) -> Result<Vec<LabeledPoint>, EvalError> {
    build(dataset, labels, scheme, cfg, |s| [s.weight, s.score])
}

/// Features with weighting disabled: `(1, similarity)`.
pub fn baseline2_featurize(
    dataset: &[Entity],
    labels: &LabelSet,
    cfg: &ImputationConfig,
) -> Result<Vec<LabeledPoint>, EvalError> {
    build(dataset, labels, WeightingScheme::Linear, cfg, |s| {
        [1.0, s.similarity]
    })
}
