use serde::Serialize;

use super::{rank_detailed, Entity, ImputationConfig, IndexError, Metric, Ranking, WeightingScheme};

pub const DEFAULT_NEIGHBORS: usize = 10;
pub const DEFAULT_GAMMA: f64 = 0.7;

/// User-facing ranking parameters. `gamma` is range-checked for every scheme
/// so that a bad value is reported even when it would go unused.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankParams {
    pub scheme: &'static str,
    pub gamma: f64,
    pub neighbors: usize,
    pub metric: Metric,
}

impl Default for RankParams {
    fn default() -> Self {
        Self {
            scheme: "linear",
            gamma: DEFAULT_GAMMA,
            neighbors: DEFAULT_NEIGHBORS,
            metric: Metric::Cosine,
        }
    }
}

impl RankParams {
    pub fn new(scheme: &str, gamma: f64, neighbors: usize, metric: Metric) -> Result<Self, IndexError> {
        let parsed = WeightingScheme::from_name(scheme, gamma)?;
        WeightingScheme::sigmoid(gamma)?;
        ImputationConfig::new(neighbors, metric)?;
        Ok(Self {
            scheme: parsed.name(),
            gamma,
            neighbors,
            metric,
        })
    }

    pub fn scheme(&self) -> WeightingScheme {
        WeightingScheme::from_name(self.scheme, self.gamma).expect("validated on construction")
    }

    pub fn imputation(&self) -> ImputationConfig {
        ImputationConfig::new(self.neighbors, self.metric).expect("validated on construction")
    }

    pub fn rank(&self, dataset: &[Entity]) -> Result<Ranking, IndexError> {
        rank_detailed(dataset, self.scheme(), &self.imputation())
    }
}
