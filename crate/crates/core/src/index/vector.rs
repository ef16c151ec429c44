use serde::{Deserialize, Serialize};

use super::IndexError;

/// A country's indicator values after normalization.
///
/// Each cell is either a present value in `[0, 1]` or missing (`None`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Option<f64>>", into = "Vec<Option<f64>>")]
pub struct IndicatorVector(Vec<Option<f64>>);

impl IndicatorVector {
    pub fn new(cells: Vec<Option<f64>>) -> Result<Self, IndexError> {
        for (i, cell) in cells.iter().enumerate() {
            if let Some(v) = *cell {
                if !(0.0..=1.0).contains(&v) {
                    return Err(IndexError::OutOfRange { index: i, value: v });
                }
            }
        }
        Ok(Self(cells))
    }

    /// A vector with every cell present.
    pub fn complete(values: &[f64]) -> Result<Self, IndexError> {
        Self::new(values.iter().copied().map(Some).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn cells(&self) -> &[Option<f64>] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        self.0.get(i).copied().flatten()
    }

    pub fn is_complete(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    pub fn n_missing(&self) -> usize {
        self.0.iter().filter(|c| c.is_none()).count()
    }

    /// Dense copy with missing cells replaced by `0.0`.
    pub fn zero_fill(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.unwrap_or(0.0)).collect()
    }
}

impl TryFrom<Vec<Option<f64>>> for IndicatorVector {
    type Error = IndexError;

    fn try_from(cells: Vec<Option<f64>>) -> Result<Self, Self::Error> {
        Self::new(cells)
    }
}

impl From<IndicatorVector> for Vec<Option<f64>> {
    fn from(v: IndicatorVector) -> Self {
        v.0
    }
}

/// A named row of the indicator matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub name: String,
    pub values: IndicatorVector,
}

impl Entity {
    pub fn new(name: impl Into<String>, values: IndicatorVector) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }
}

/// Free-function form of [`IndicatorVector::zero_fill`].
pub fn zero_fill(v: &IndicatorVector) -> Vec<f64> {
    v.zero_fill()
}
