use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::impute::{impute, ImputationConfig, ImputedEntity, ImputeWarning};
use super::{
    cosine_similarity, coverage, CoverageWeight, Entity, IndexError, IndicatorVector,
    WeightingScheme,
};

/// One row of a ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCountry {
    pub name: String,
    /// 1-based position; zero until the row has been ranked.
    pub rank: usize,
    pub score: f64,
    pub similarity: f64,
    pub g: f64,
    pub n_missing: usize,
    pub weight: f64,
}

impl ScoredCountry {
    pub fn coverage(&self) -> CoverageWeight {
        CoverageWeight {
            g: self.g,
            n_missing: self.n_missing,
        }
    }
}

/// Element-wise maximum over the present cells of `rows`.
///
/// A column with no present value contributes `0.0`.
pub fn ideal_country(rows: &[IndicatorVector]) -> Result<Vec<f64>, IndexError> {
    let first = rows.first().ok_or(IndexError::EmptyDataset)?;
    let width = first.len();
    let mut ideal = vec![0.0_f64; width];
    for row in rows {
        if row.len() != width {
            return Err(IndexError::LengthMismatch {
                left: width,
                right: row.len(),
            });
        }
        for (slot, cell) in ideal.iter_mut().zip(row.cells()) {
            if let Some(v) = *cell {
                *slot = slot.max(v);
            }
        }
    }
    Ok(ideal)
}

/// Similarity of an imputed row to the ideal, weighted by its original coverage.
pub fn score(
    entity: &ImputedEntity,
    ideal: &[f64],
    scheme: WeightingScheme,
) -> Result<ScoredCountry, IndexError> {
    let similarity = cosine_similarity(&entity.values, ideal)?;
    let cov = coverage(&entity.original);
    let weight = scheme.apply(cov.g);
    Ok(ScoredCountry {
        name: entity.name.clone(),
        rank: 0,
        score: similarity * weight,
        similarity,
        g: cov.g,
        n_missing: cov.n_missing,
        weight,
    })
}

/// Full output of the ranking pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub scored: Vec<ScoredCountry>,
    pub imputed: Vec<ImputedEntity>,
    pub ideal: Vec<f64>,
    pub warnings: Vec<ImputeWarning>,
}

/// Impute, build the ideal over the imputed rows, score, then sort by
/// descending score with ties broken by ascending name.
pub fn rank_detailed(
    dataset: &[Entity],
    scheme: WeightingScheme,
    cfg: &ImputationConfig,
) -> Result<Ranking, IndexError> {
    if dataset.is_empty() {
        return Err(IndexError::EmptyDataset);
    }
    let imputation = impute(dataset, cfg)?;
    let dense: Vec<IndicatorVector> = imputation
        .entities
        .iter()
        .map(|e| IndicatorVector::complete(&e.values))
        .collect::<Result<_, _>>()?;
    let ideal = ideal_country(&dense)?;

    let mut scored = imputation
        .entities
        .iter()
        .map(|e| score(e, &ideal, scheme))
        .collect::<Result<Vec<_>, _>>()?;
    sort_ranking(&mut scored);

    Ok(Ranking {
        scored,
        imputed: imputation.entities,
        ideal,
        warnings: imputation.warnings,
    })
}

pub fn rank(
    dataset: &[Entity],
    scheme: WeightingScheme,
    cfg: &ImputationConfig,
) -> Result<Vec<ScoredCountry>, IndexError> {
    rank_detailed(dataset, scheme, cfg).map(|r| r.scored)
}

fn sort_ranking(scored: &mut [ScoredCountry]) {
    scored.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.name.cmp(&b.name))
    });
    for (i, s) in scored.iter_mut().enumerate() {
        s.rank = i + 1;
    }
}
