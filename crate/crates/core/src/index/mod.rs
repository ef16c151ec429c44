//! Numerical kernels of the readiness index: similarity, imputation,
//! coverage weighting, scoring and ranking.

mod impute;
mod params;
mod scoring;
mod similarity;
mod vector;
mod weighting;

use thiserror::Error;

pub use impute::{
    complete_pool, impute, select_donors, ImputationConfig, Imputation, ImputeWarning,
    ImputedEntity,
};
pub use params::{RankParams, DEFAULT_GAMMA, DEFAULT_NEIGHBORS};
pub use scoring::{ideal_country, rank, rank_detailed, score, Ranking, ScoredCountry};
pub use similarity::{cosine_similarity, euclidean_similarity, Metric};
pub use vector::{zero_fill, Entity, IndicatorVector};
pub use weighting::{coverage, weight, CoverageWeight, WeightingScheme};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("indicator {index} value {value} outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("no complete country available as imputation donor")]
    NoDonors,
    #[error("{0}")]
    InvalidParameter(String),
}
